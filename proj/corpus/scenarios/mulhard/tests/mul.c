void test_volume() {
  assert(volume(2, 3, 4) == 24);
}

void test_twice() {
  assert(twice(5) == 10);
}
