int limits[4] = {3, 5, 8, 13};

// Sum of the first n configured limits (at most four).
int sum_of_limits(int n) {
  int s = 0;
  int i = 0;
  // Stop at the table end even when n is larger.
  while (i < n && i < 4) {
    s = s + limits[i];
    i = i + 1;
  }
  return s;
}

// Twice the limit sum; callers treat it as a soft budget.
int budget(int n) {
  return sum_of_limits(n) * 2;
}
