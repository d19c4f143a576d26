void test_max() {
  vec_push(-3);
  vec_push(5);
  vec_push(2);
  assert(vec_max() == 5);
}

void test_sum() {
  int i = 1;
  while (i <= 4) {
    vec_push(i);
    i = i + 1;
  }
  assert(vec_sum() == 10);
}

void test_reverse() {
  vec_push(1);
  vec_push(2);
  vec_push(3);
  vec_reverse();
  assert(vec_get(0) == 3 && vec_get(2) == 1);
}
