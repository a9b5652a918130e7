// Exit status 0 iff a 256x256 dgemm agrees with a plain loop.
#include <cblas.h>

#include <cmath>
#include <cstdio>
#include <vector>

int main() {
  const int n = 256;
  std::vector<double> a(n * n), b(n * n), c(n * n, 0.0), ref(n * n, 0.0);
  unsigned state = 12345u;
  auto next = [&state] {
    state = state * 1103515245u + 12345u;
    return static_cast<double>((state >> 8) & 0xffff) / 32768.0 - 1.0;
  };
  for (double& x : a) x = next();
  for (double& x : b) x = next();
  cblas_dgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, n, n, n, 1.0, a.data(), n, b.data(), n,
              0.0, c.data(), n);
  double err = 0.0;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) ref[j * n + i] += a[k * n + i] * b[j * n + k];
  for (int i = 0; i < n * n; ++i) err = std::fmax(err, std::fabs(c[i] - ref[i]));
  std::printf("%g\n", err);
  return err < 1e-9 ? 0 : 1;
}
