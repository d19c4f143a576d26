// minivec: a bounded vector of ints backed by a static array.
// Capacity starts at 4 and grows on demand up to the array size.

int data[8];
int length;
int capacity = 4;

// Doubles the capacity; false once the backing array is exhausted.
bool vec_expand() {
  if (capacity >= 8) {
    return false;
  }
  capacity = capacity * 2;
  return true;
}

bool vec_full() {
  return length >= capacity;
}

void vec_clear() {
  length = 0;
}

int vec_size() {
  return length;
}

bool vec_empty() {
  return length == 0;
}

bool vec_push(int v) {
  if (vec_full() && !vec_expand()) {
    return false;
  }
  data[length] = v;
  length = length + 1;
  return true;
}

int vec_pop() {
  if (length <= 0) {
    return 0;
  }
  length = length - 1;
  return data[length];
}

// Negative positions count from the back, as in Python.
int vec_get(int pos) {
  if (pos < 0) {
    pos = pos + length;
  }
  if (pos < 0 || pos >= length) {
    return 0;
  }
  return data[pos];
}

bool vec_set(int pos, int v) {
  if (pos < 0 || pos >= length) {
    return false;
  }
  data[pos] = v;
  return true;
}

bool vec_insert(int pos, int v) {
  if (pos < 0 || pos > length) {
    return false;
  }
  if (vec_full() && !vec_expand()) {
    return false;
  }
  int i = length;
  while (i > pos) {
    data[i] = data[i - 1];
    i = i - 1;
  }
  data[pos] = v;
  length = length + 1;
  return true;
}

bool vec_erase(int pos) {
  if (pos < 0 || pos >= length) {
    return false;
  }
  int i = pos;
  while (i < length - 1) {
    data[i] = data[i + 1];
    i = i + 1;
  }
  length = length - 1;
  return true;
}

int vec_find(int v) {
  int i = 0;
  while (i < length) {
    if (data[i] == v) {
      return i;
    }
    i = i + 1;
  }
  return -1;
}

bool vec_contains(int v) {
  return vec_find(v) >= 0;
}

int vec_max() {
  int m = data[0];
  int i = 1;
  while (i < length) {
    if (data[i] > m) {
      m = data[i];
    }
    i = i + 1;
  }
  return m;
}

int vec_sum() {
  int s = 0;
  for (int i = 0; i < length; i++) {
    s += data[i];
  }
  return s;
}

void vec_swap(int a, int b) {
  int t = data[a];
  data[a] = data[b];
  data[b] = t;
}

void vec_reverse() {
  int lo = 0;
  int hi = length - 1;
  while (lo < hi) {
    vec_swap(lo, hi);
    lo = lo + 1;
    hi = hi - 1;
  }
}
