int volume(int a, int b, int c) {
  return (a * b) * c;
}

int twice(int x) {
  return x + x;
}
