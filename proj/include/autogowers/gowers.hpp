#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <stdexcept>
#include <string>
#include <vector>

#include "autogowers/digits.hpp"
#include "autogowers/value.hpp"

namespace autogowers {

// ---- primality (deterministic Miller-Rabin for 64-bit) ----

namespace detail {

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}
inline std::uint64_t powmod_u64(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, a, m);
    a = mulmod_u64(a, a, m);
    e >>= 1;
  }
  return r;
}

}  // namespace detail

inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = detail::powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < s; ++i) {
      x = detail::mulmod_u64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

/// least prime > 2dN (the embedding modulus for U^d[N])
inline std::uint64_t embedding_prime(std::uint64_t n, int d) {
  std::uint64_t x = 2 * static_cast<std::uint64_t>(d) * n + 1;
  while (!is_prime_u64(x)) ++x;
  return x;
}

// ---- Pi(N) ----

/// |Pi(N)| for dimension d: splitting each coordinate into its positive and
/// negative part gives sum_{n0} sum_{a+b<=d} d!/(a!b!(d-a-b)!) C(N-1-n0, a)
/// C(n0, b), and the Vandermonde identity collapses the n0 sum to
/// C(N, a+b+1), so the count is a polynomial in N.
inline BigInt pi_count(BigInt n, int d) {
  if (n <= 0) return 0;
  auto binom = [](const BigInt& top, int k) {
    BigInt r = 1;
    for (int i = 0; i < k; ++i) {
      r *= (top - i);
      r /= (i + 1);
    }
    return r;
  };
  BigInt total = 0;
  for (int a = 0; a <= d; ++a)
    for (int b = 0; a + b <= d; ++b) {
      BigInt m = 1;
      for (int i = 1; i <= d; ++i) m *= i;
      for (int i = 1; i <= a; ++i) m /= i;
      for (int i = 1; i <= b; ++i) m /= i;
      for (int i = 1; i <= d - a - b; ++i) m /= i;
      total += m * binom(n, a + b + 1);
    }
  return total;
}

inline BigInt pi_count(std::uint64_t n, int d) { return pi_count(BigInt(n), d); }

/// Enumerates Pi(N) with per-coordinate clipping; visit(vec) gets the tuple.
inline void for_each_pi_tuple(std::int64_t n, int d,
                              const std::function<void(const std::vector<std::int64_t>&)>& visit) {
  std::vector<std::int64_t> vec(d + 1);
  // budgets: bp = N-1-n0 - sum positives, bm = n0 - sum negatives
  std::function<void(int, std::int64_t, std::int64_t)> rec = [&](int i, std::int64_t bp,
                                                                 std::int64_t bm) {
    if (i == d + 1) {
      visit(vec);
      return;
    }
    for (std::int64_t v = -bm; v <= bp; ++v) {
      vec[i] = v;
      rec(i + 1, bp - std::max<std::int64_t>(v, 0), bm + std::min<std::int64_t>(v, 0));
    }
  };
  for (std::int64_t n0 = 0; n0 < n; ++n0) {
    vec[0] = n0;
    rec(1, n - 1 - n0, n0);
  }
}

struct NormResult {
  int d = 1;
  std::uint64_t n = 0;       // interval length
  std::uint64_t ntilde = 0;  // least prime > 2dN
  double value = 0;
  std::string method;        // naive | dp | fft2 | cyclic
  double seconds = 0;
};

constexpr std::uint64_t kDefaultBudget = 1ull << 34;

inline void check_budget(std::uint64_t n, int d, std::uint64_t budget, bool force) {
  if (force) return;
  double ops = std::pow(static_cast<double>(n), d + 1);
  if (ops > static_cast<double>(budget))
    throw std::runtime_error("budget exceeded: N^(d+1) > " + std::to_string(budget) +
                             " (use force/AUTOGOWERS_BUDGET to override)");
}

/// ||f||_{U^d(Z/NZ)} by direct averaging over (Z/N)^{d+1}.
inline double gowers_norm_cyclic(const std::vector<Complex>& f, int d,
                                 std::uint64_t budget = kDefaultBudget, bool force = false) {
  std::int64_t n = static_cast<std::int64_t>(f.size());
  if (d < 1) throw std::invalid_argument("d must be >= 1");
  check_budget(f.size(), d, budget, force);
  int twod = 1 << d;
  std::vector<std::int64_t> idx(d + 1);
  Complex total = 0;
  std::uint64_t count = 1;
  for (int i = 0; i <= d; ++i) count *= n;
  std::function<void(int)> rec = [&](int i) {
    if (i == d + 1) {
      Complex prod = 1;
      for (int mask = 0; mask < twod; ++mask) {
        std::int64_t s = idx[0];
        for (int b = 1; b <= d; ++b)
          if ((mask >> (d - b)) & 1) s += idx[b];
        Complex v = f[((s % n) + n) % n];
        prod *= (__builtin_popcount(static_cast<unsigned>(mask)) % 2) ? std::conj(v) : v;
      }
      total += prod;
      return;
    }
    for (std::int64_t v = 0; v < n; ++v) {
      idx[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
  Complex avg = total / static_cast<double>(count);
  if (std::abs(avg.imag()) > 1e-12 * std::max(1.0, std::abs(avg.real())))
    throw std::logic_error("U^d average has nonvanishing imaginary part");
  double re = std::max(avg.real(), 0.0);
  return std::pow(re, 1.0 / twod);
}

/// ||f||_{U^d[N]} summing directly over Pi(N) (eq-def via the lattice).
/// Partial sums are kept per outermost coordinate n0 and combined by a
/// fixed-shape tree, so any thread count produces bit-identical results.
inline NormResult gowers_norm_interval_naive(const std::vector<Complex>& f, int d,
                                             std::uint64_t budget = kDefaultBudget,
                                             bool force = false, int threads = 1) {
  std::int64_t n = static_cast<std::int64_t>(f.size());
  check_budget(f.size(), d, budget, force);
  int twod = 1 << d;
  std::vector<Complex> partial(n, 0.0);
  std::vector<std::uint64_t> counts(n, 0);
  auto work = [&](std::int64_t n0) {
    Complex acc = 0;
    std::uint64_t cnt = 0;
    std::vector<std::int64_t> vec(d + 1);
    vec[0] = n0;
    std::function<void(int, std::int64_t, std::int64_t)> rec = [&](int i, std::int64_t bp,
                                                                   std::int64_t bm) {
      if (i == d + 1) {
        Complex prod = 1;
        for (int mask = 0; mask < twod; ++mask) {
          std::int64_t s = vec[0];
          for (int b = 1; b <= d; ++b)
            if ((mask >> (d - b)) & 1) s += vec[b];
          Complex v = f[s];
          prod *= (__builtin_popcount(static_cast<unsigned>(mask)) % 2) ? std::conj(v) : v;
        }
        acc += prod;
        ++cnt;
        return;
      }
      for (std::int64_t v = -bm; v <= bp; ++v) {
        vec[i] = v;
        rec(i + 1, bp - std::max<std::int64_t>(v, 0), bm + std::min<std::int64_t>(v, 0));
      }
    };
    rec(1, n - 1 - n0, n0);
    partial[n0] = acc;
    counts[n0] = cnt;
  };
  threads = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (threads == 1) {
    for (std::int64_t n0 = 0; n0 < n; ++n0) work(n0);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::int64_t> next{0};
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::int64_t n0 = next.fetch_add(1); n0 < n; n0 = next.fetch_add(1)) work(n0);
      });
    for (auto& th : pool) th.join();
  }
  // fixed-shape tree reduction
  std::function<Complex(std::int64_t, std::int64_t)> reduce = [&](std::int64_t lo,
                                                                  std::int64_t hi) -> Complex {
    if (hi - lo == 1) return partial[lo];
    std::int64_t mid = lo + (hi - lo) / 2;
    return reduce(lo, mid) + reduce(mid, hi);
  };
  Complex total = reduce(0, n);
  std::uint64_t count = 0;
  for (auto c : counts) count += c;
  NormResult r;
  r.d = d;
  r.n = static_cast<std::uint64_t>(n);
  r.ntilde = embedding_prime(r.n, d);
  r.method = "naive";
  Complex avg = total / static_cast<double>(count);
  if (std::abs(avg.imag()) > 1e-9) throw std::logic_error("U^d[N] average not real");
  r.value = std::pow(std::max(avg.real(), 0.0), 1.0 / twod);
  return r;
}

inline std::vector<Complex> dft(const std::vector<Complex>& f) {
  size_t n = f.size();
  std::vector<Complex> out(n, 0.0);
  for (size_t k = 0; k < n; ++k) {
    Complex acc = 0;
    for (size_t j = 0; j < n; ++j) {
      double th = -2.0 * M_PI * static_cast<double>(k * j % n) / static_cast<double>(n);
      acc += f[j] * Complex(std::cos(th), std::sin(th));
    }
    out[k] = acc / static_cast<double>(n);  // E-normalised Fourier coefficients
  }
  return out;
}

/// d=2 only: U^2[N] through the Fourier identity on Z/Ntilde.
inline NormResult gowers_norm_interval_fft2(const std::vector<Complex>& f) {
  std::uint64_t n = f.size();
  std::uint64_t nt = embedding_prime(n, 2);
  std::vector<Complex> g(nt, 0.0), one(nt, 0.0);
  for (std::uint64_t i = 0; i < n; ++i) {
    g[i] = f[i];
    one[i] = 1.0;
  }
  auto gh = dft(g), oh = dft(one);
  double num = 0, den = 0;
  for (std::uint64_t k = 0; k < nt; ++k) {
    num += std::pow(std::abs(gh[k]), 4);
    den += std::pow(std::abs(oh[k]), 4);
  }
  NormResult r;
  r.d = 2;
  r.n = n;
  r.ntilde = nt;
  r.method = "fft2";
  r.value = std::pow(num / den, 0.25);
  return r;
}

// ---- smoothing lemma ----

struct Progression {
  std::uint64_t start = 0, step = 1, length = 1;  // {start + step*m : m < length} mod N
};

struct SmoothReport {
  std::vector<double> f;
  int K = 1;
  double lp_err_1 = 0, lp_err_2 = 0, lp_err_4 = 0;  // ||f - 1_P||_{L^p}
  double fourier_l1 = 0;                            // ||f hat||_{l^1}
};

/// f = 1_P * (N/K) 1_{a[K]} with K = max(floor(eta N / 2), 1); N must be prime.
inline SmoothReport smooth_approx(std::uint64_t n, const Progression& p, double eta) {
  if (!is_prime_u64(n)) throw std::invalid_argument("smooth_approx needs prime N");
  if (!(eta > 0 && eta <= 1)) throw std::invalid_argument("eta must be in (0,1]");
  SmoothReport rep;
  rep.K = std::max<int>(static_cast<int>(std::floor(eta * static_cast<double>(n) / 2.0)), 1);
  std::vector<char> inP(n, 0);
  for (std::uint64_t m = 0; m < p.length; ++m) inP[(p.start + p.step * m) % n] = 1;
  rep.f.assign(n, 0.0);
  for (std::uint64_t x = 0; x < n; ++x) {
    int c = 0;
    for (int j = 0; j < rep.K; ++j) {
      std::uint64_t y = (x + n * static_cast<std::uint64_t>(rep.K) - p.step % n * j % n) % n;
      c += inP[y];
    }
    rep.f[x] = static_cast<double>(c) / rep.K;
  }
  double e1 = 0, e2 = 0, e4 = 0;
  for (std::uint64_t x = 0; x < n; ++x) {
    double dlt = std::abs(rep.f[x] - (inP[x] ? 1.0 : 0.0));
    e1 += dlt;
    e2 += dlt * dlt;
    e4 += dlt * dlt * dlt * dlt;
  }
  rep.lp_err_1 = e1 / n;
  rep.lp_err_2 = std::sqrt(e2 / n);
  rep.lp_err_4 = std::pow(e4 / n, 0.25);
  std::vector<Complex> fc(rep.f.begin(), rep.f.end());
  auto fh = dft(fc);
  for (auto& c : fh) rep.fourier_l1 += std::abs(c);
  return rep;
}

struct RestrictionReport {
  double lhs = 0, rhs = 0, alpha_d = 0, ratio = 0;  // ratio = lhs / rhs^{alpha_d}
};

/// Both sides of ||a 1_P||_{U^d[N]} << ||a||_{U^d[N]}^{alpha_d},
/// alpha_d = (d+1)/(2^{d-1}+d-1).
inline RestrictionReport restriction_check(const std::vector<Complex>& f,
                                           const std::vector<char>& inP, int d,
                                           std::uint64_t budget = kDefaultBudget,
                                           bool force = false) {
  RestrictionReport r;
  r.alpha_d = static_cast<double>(d + 1) / ((1 << (d - 1)) + d - 1);
  std::vector<Complex> fp(f.size());
  for (size_t i = 0; i < f.size(); ++i) fp[i] = inP[i] ? f[i] : Complex(0.0);
  r.lhs = gowers_norm_interval_naive(fp, d, budget, force).value;
  r.rhs = gowers_norm_interval_naive(f, d, budget, force).value;
  r.ratio = r.rhs > 0 ? r.lhs / std::pow(r.rhs, r.alpha_d) : 0.0;
  return r;
}

// ---- arithmetic progressions in sets ----

/// #{x : x, x+m, ..., x+(l-1)m all in A}; A given on [N]. m = 0 counts |A|.
inline std::uint64_t ap_count(const std::vector<char>& a, int l, std::uint64_t m) {
  std::uint64_t n = a.size(), c = 0;
  for (std::uint64_t x = 0; x < n; ++x) {
    bool ok = true;
    for (int i = 0; i < l && ok; ++i) {
      std::uint64_t y = x + m * static_cast<std::uint64_t>(i);
      if (y >= n || !a[y]) ok = false;
    }
    c += ok;
  }
  return c;
}

struct ManyApReport {
  double alpha = 0;
  double threshold = 0;       // (alpha^l - eps) N
  std::uint64_t good_m = 0;   // qualifying m in [N]
  double fraction = 0;
};

inline ManyApReport many_ap_check(const std::vector<char>& a, int l, double eps) {
  ManyApReport rep;
  std::uint64_t n = a.size(), cnt = 0;
  for (char c : a) cnt += c;
  rep.alpha = static_cast<double>(cnt) / n;
  rep.threshold = (std::pow(rep.alpha, l) - eps) * static_cast<double>(n);
  for (std::uint64_t m = 0; m < n; ++m)
    if (static_cast<double>(ap_count(a, l, m)) >= rep.threshold) ++rep.good_m;
  rep.fraction = static_cast<double>(rep.good_m) / n;
  return rep;
}

struct PeriodicCorrelation {
  double max_corr = 0;
  std::uint64_t best_q = 1, best_r = 0;
};

/// max over q <= P_max, r < q of |E_{n<N, n=r mod q} f(n)| (conditional
/// mean over the class); spans all periodic sequences of period <= P_max by
/// linearity.
inline PeriodicCorrelation periodic_correlation(const std::vector<Complex>& f, int p_max) {
  PeriodicCorrelation rep;
  std::uint64_t n = f.size();
  for (std::uint64_t q = 1; q <= static_cast<std::uint64_t>(p_max); ++q)
    for (std::uint64_t r = 0; r < q; ++r) {
      Complex acc = 0;
      std::uint64_t count = 0;
      for (std::uint64_t x = r; x < n; x += q) {
        acc += f[x];
        ++count;
      }
      if (count == 0) continue;
      double c = std::abs(acc) / static_cast<double>(count);
      if (c > rep.max_corr) {
        rep.max_corr = c;
        rep.best_q = q;
        rep.best_r = r;
      }
    }
  return rep;
}

}  // namespace autogowers
