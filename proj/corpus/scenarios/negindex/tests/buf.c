void test_at_front() {
  buf_put(6);
  buf_put(7);
  assert(buf_at(0) == 6);
}

void test_put_only() {
  buf_put(1);
  assert(used == 1);
}
