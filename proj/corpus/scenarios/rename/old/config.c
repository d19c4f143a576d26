int limits[4] = {3, 5, 8, 13};

int limit_sum(int n) {
  int s = 0;
  int i = 0;
  while (i < n && i < 4) {
    s = s + limits[i];
    i = i + 1;
  }
  return s;
}

int budget(int n) {
  return limit_sum(n) * 2;
}
