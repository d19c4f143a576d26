// set overwrites in place and negative positions count from the back
void test_get_set() {
  vec_push(1);
  vec_push(2);
  vec_push(3);
  assert(vec_set(1, 7));
  assert(vec_get(1) == 7);
  assert(vec_get(-1) == 3);
  assert(!vec_set(3, 0));
}

// erasing the head shifts the rest down
void test_erase() {
  vec_push(1);
  vec_push(2);
  vec_push(3);
  assert(vec_erase(0));
  assert(vec_get(0) == 2 && vec_size() == 2);
}

void test_find() {
  vec_push(4);
  vec_push(5);
  vec_push(6);
  assert(vec_find(6) == 2);
  assert(vec_find(9) == -1);
}

void test_contains() {
  vec_push(8);
  assert(vec_contains(8));
  assert(!vec_contains(7));
}
