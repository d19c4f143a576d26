int buf[4];
int used;

// Reads slot i; out-of-range reads yield zero.
int buf_at(int i) {
  if (i < 0 || i >= used) {
    return 0;
  }
  return buf[i];
}

void buf_put(int v) {
  if (used < 4) {
    buf[used] = v;
    used = used + 1;
  }
}
