// a successful insert grows the vector by one
void test_insert_grows() {
  vec_push(1);
  if (vec_insert(0, 5)) {
    assert(vec_size() == 2);
  }
}

// an inserted value can be found afterwards
void test_insert_contains() {
  vec_push(1);
  vec_push(2);
  int v = 9;
  if (vec_insert(1, v)) {
    assert(vec_contains(v));
  }
}
