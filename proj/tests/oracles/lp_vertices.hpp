#pragma once

// Brute-force minimum of the grand-canonical SCE linear program by walking
// every feasible basis. Shares no code with the library solver: configurations,
// costs and the initial vertex are built here from scratch.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <new>
#include <stdexcept>
#include <vector>

#if defined(__linux__)
#include <sys/mman.h>
#endif
#if defined(__x86_64__) && defined(__GNUC__)
#include <immintrin.h>
#endif

namespace oracle {

struct LPInstance {
  std::vector<Eigen::VectorXd> points;
  std::vector<double> weights;
  double s = 0.5;
  int nmax = 0;
};

struct LPVertexResult {
  double value = std::numeric_limits<double>::infinity();
  long long bases_visited = 0;
};

inline std::vector<std::vector<int>> subsets_up_to(int m, int nmax) {
  std::vector<std::vector<int>> out;
  for (int mask = 1; mask < (1 << m); ++mask) {
    std::vector<int> s;
    for (int i = 0; i < m; ++i)
      if ((mask >> i) & 1) s.push_back(i);
    if (static_cast<int>(s.size()) <= nmax) out.push_back(s);
  }
  return out;
}

// Open-addressing set of nonzero 64-bit masks. Probes are random, so the
// table asks for huge pages where the kernel offers them.
class MaskSet {
public:
  MaskSet() = default;
  MaskSet(const MaskSet&) = delete;
  MaskSet& operator=(const MaskSet&) = delete;
  ~MaskSet() { std::free(slots_); }

  void prefetch(std::uint64_t key) const {
    if (slots_) __builtin_prefetch(&slots_[hash(key) & (cap_ - 1)]);
  }
  bool insert(std::uint64_t key) {
    if (2 * (size_ + 1) > cap_) grow();
    std::size_t i = hash(key) & (cap_ - 1);
    while (slots_[i] != 0) {
      if (slots_[i] == key) return false;
      i = (i + 1) & (cap_ - 1);
    }
    slots_[i] = key;
    ++size_;
    return true;
  }

private:
  static std::size_t hash(std::uint64_t x) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    return static_cast<std::size_t>(x);
  }
  static std::uint64_t* allocate(std::size_t n) {
    const std::size_t bytes = std::max<std::size_t>(n * sizeof(std::uint64_t), std::size_t(1) << 21);
    void* p = std::aligned_alloc(std::size_t(1) << 21, bytes);
    if (!p) throw std::bad_alloc();
#ifdef MADV_HUGEPAGE
    madvise(p, bytes, MADV_HUGEPAGE);
#endif
    std::memset(p, 0, bytes);
    return static_cast<std::uint64_t*>(p);
  }
  void grow() {
    std::uint64_t* old = slots_;
    const std::size_t old_cap = cap_;
    cap_ = std::max<std::size_t>(1024, cap_ * 2);
    slots_ = allocate(cap_);
    size_ = 0;
    for (std::size_t i = 0; i < old_cap; ++i)
      if (old[i] != 0) insert(old[i]);
    std::free(old);
  }
  std::uint64_t* slots_ = nullptr;
  std::size_t cap_ = 0;
  std::size_t size_ = 0;
};

inline bool tie_set(double flag) {
  std::uint64_t bits;
  std::memcpy(&bits, &flag, sizeof bits);
  return bits != 0;
}

// One row of the minimum-ratio sweep: lane q keeps the best (num, den, row)
// over rows seen so far with den > tol, compared as num/den by
// cross-multiplication; lanes where row k comes within the band of the best
// get their tie flag set (all bits in the vector paths, 1.0 in the plain one).
inline void ratio_sweep_plain(const double* __restrict u, double r, double k, int lanes, double tol,
                              double* __restrict num, double* __restrict den, double* __restrict row,
                              double* __restrict tie) {
  for (int q = 0; q < lanes; ++q) {
    if (u[q] <= tol) continue;
    const double lhs = r * den[q], cur = num[q] * u[q];
    const double band = 1e-12 * (u[q] * den[q] + lhs);
    if (den[q] == 0.0 || lhs < cur - band) {
      num[q] = r;
      den[q] = u[q];
      row[q] = k;
    } else if (lhs <= cur + band) {
      tie[q] = 1.0;
    }
  }
}

#if defined(__x86_64__) && defined(__GNUC__)
#define ORACLE_SWEEP_BODY(V, W, set1, setzero, load, store, mul, add, sub, and_, or_, andnot, gt, lt, eq) \
  const V vr = set1(r), vk = set1(k), vtol = set1(tol), zero = setzero(), rel = set1(1e-12);             \
  for (int q = 0; q < lanes; q += W) {                                                                    \
    const V uq = load(u + q), dq = load(den + q), nq = load(num + q);                                     \
    const V lhs = mul(vr, dq), cur = mul(nq, uq);                                                         \
    const V band = mul(rel, add(mul(uq, dq), lhs));                                                       \
    const V cand = gt(uq, vtol), none = eq(dq, zero);                                                     \
    const V below = lt(lhs, sub(cur, band)), above = gt(lhs, add(cur, band));                             \
    const V take = and_(cand, or_(none, below));                                                          \
    const V equal = andnot(or_(or_(none, below), above), cand);                                           \
    store(tie + q, or_(load(tie + q), equal));                                                            \
    store(num + q, or_(and_(take, vr), andnot(take, nq)));                                                \
    store(den + q, or_(and_(take, uq), andnot(take, dq)));                                                \
    store(row + q, or_(and_(take, vk), andnot(take, load(row + q))));                                     \
  }

inline void ratio_sweep_sse2(const double* __restrict u, double r, double k, int lanes, double tol,
                             double* __restrict num, double* __restrict den, double* __restrict row,
                             double* __restrict tie) {
  ORACLE_SWEEP_BODY(__m128d, 2, _mm_set1_pd, _mm_setzero_pd, _mm_load_pd, _mm_store_pd, _mm_mul_pd, _mm_add_pd,
                    _mm_sub_pd, _mm_and_pd, _mm_or_pd, _mm_andnot_pd, _mm_cmpgt_pd, _mm_cmplt_pd, _mm_cmpeq_pd)
}

__attribute__((target("avx2"))) inline void ratio_sweep_avx2(const double* __restrict u, double r, double k,
                                                             int lanes, double tol, double* __restrict num,
                                                             double* __restrict den, double* __restrict row,
                                                             double* __restrict tie) {
#define ORACLE_GT(x, y) _mm256_cmp_pd(x, y, _CMP_GT_OQ)
#define ORACLE_LT(x, y) _mm256_cmp_pd(x, y, _CMP_LT_OQ)
#define ORACLE_EQ(x, y) _mm256_cmp_pd(x, y, _CMP_EQ_OQ)
  ORACLE_SWEEP_BODY(__m256d, 4, _mm256_set1_pd, _mm256_setzero_pd, _mm256_load_pd, _mm256_store_pd, _mm256_mul_pd,
                    _mm256_add_pd, _mm256_sub_pd, _mm256_and_pd, _mm256_or_pd, _mm256_andnot_pd, ORACLE_GT,
                    ORACLE_LT, ORACLE_EQ)
#undef ORACLE_GT
#undef ORACLE_LT
#undef ORACLE_EQ
}
#undef ORACLE_SWEEP_BODY
#endif

// Picks the widest sweep the CPU runs; all three give the same result.
inline auto pick_ratio_sweep(int lanes) {
#if defined(__x86_64__) && defined(__GNUC__)
  if (lanes % 4 == 0 && __builtin_cpu_supports("avx2")) return &ratio_sweep_avx2;
  if (lanes % 2 == 0) return &ratio_sweep_sse2;
#endif
  (void)lanes;
  return &ratio_sweep_plain;
}

inline LPVertexResult lp_by_vertices(const LPInstance& in, long long max_bases = 5000000) {
  const int m = static_cast<int>(in.points.size());
  const int rows = m + 1;
  const auto sets = subsets_up_to(m, in.nmax);
  const int cols = static_cast<int>(sets.size()) + 1;  // last column: P0
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, cols);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(cols);
  Eigen::VectorXd b(rows);
  for (int i = 0; i < m; ++i) b[i] = in.weights[i];
  b[m] = 1.0;
  for (int k = 0; k < cols - 1; ++k) {
    double e = 0.0;
    for (std::size_t x = 0; x < sets[k].size(); ++x) {
      a(sets[k][x], k) = 1.0;
      for (std::size_t y = x + 1; y < sets[k].size(); ++y)
        e += std::pow((in.points[sets[k][x]] - in.points[sets[k][y]]).norm(), -in.s);
    }
    a(m, k) = 1.0;
    c[k] = e;
  }
  a(m, cols - 1) = 1.0;

  // A feasible plan: lay the masses end to end on a circle of length 1 and
  // read off which arcs cover each point of the circle.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(cols);
  {
    std::vector<std::pair<double, int>> events;  // (position, point) toggles
    double pos = 0.0;
    std::vector<std::pair<double, double>> arcs(m);
    for (int i = 0; i < m; ++i) {
      arcs[i] = {pos, pos + in.weights[i]};
      pos += in.weights[i];
    }
    std::vector<double> cuts{0.0, 1.0};
    for (const auto& [lo, hi] : arcs) {
      cuts.push_back(lo - std::floor(lo));
      cuts.push_back(hi - std::floor(hi));
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t t = 0; t + 1 < cuts.size(); ++t) {
      const double len = cuts[t + 1] - cuts[t];
      if (len <= 0.0) continue;
      const double u = 0.5 * (cuts[t] + cuts[t + 1]);
      std::vector<int> cfg;
      for (int i = 0; i < m; ++i) {
        const auto [lo, hi] = arcs[i];
        // u + j for some integer j inside [lo, hi)
        const double j = std::ceil(lo - u);
        if (u + j < hi) cfg.push_back(i);
      }
      if (cfg.empty()) {
        x[cols - 1] += len;
      } else {
        auto it = std::find(sets.begin(), sets.end(), cfg);
        if (it == sets.end()) throw std::runtime_error("oracle: construction exceeds nmax");
        x[it - sets.begin()] += len;
      }
    }
  }

  // Purify to a vertex: remove null directions of the support.
  for (;;) {
    std::vector<int> sup;
    for (int j = 0; j < cols; ++j)
      if (x[j] > 1e-14) sup.push_back(j);
      else x[j] = 0.0;
    Eigen::MatrixXd as(rows, sup.size());
    for (std::size_t k = 0; k < sup.size(); ++k) as.col(k) = a.col(sup[k]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(as);
    if (lu.rank() == static_cast<int>(sup.size())) break;
    Eigen::VectorXd z = lu.kernel().col(0);
    if (z.maxCoeff() <= 0.0) z = -z;
    double t = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < sup.size(); ++k)
      if (z[k] > 1e-14) t = std::min(t, x[sup[k]] / z[k]);
    for (std::size_t k = 0; k < sup.size(); ++k) x[sup[k]] -= t * z[k];
  }

  // Complete the support to a basis.
  std::vector<int> basis;
  for (int j = 0; j < cols; ++j)
    if (x[j] > 0.0) basis.push_back(j);
  for (int j = 0; j < cols && static_cast<int>(basis.size()) < rows; ++j) {
    if (std::find(basis.begin(), basis.end(), j) != basis.end()) continue;
    Eigen::MatrixXd t(rows, basis.size() + 1);
    for (std::size_t k = 0; k < basis.size(); ++k) t.col(k) = a.col(basis[k]);
    t.col(basis.size()) = a.col(j);
    if (Eigen::FullPivLU<Eigen::MatrixXd>(t).rank() == static_cast<int>(basis.size()) + 1) basis.push_back(j);
  }
  std::sort(basis.begin(), basis.end());

  // Bases are bit masks over the (at most 64) columns.
  if (cols > 64) throw std::runtime_error("oracle: more than 64 columns");
  if (rows > 8) throw std::runtime_error("oracle: more than 7 points");
  std::uint64_t start = 0;
  for (int j : basis) start |= std::uint64_t(1) << j;

  const double tol = 1e-11;
  LPVertexResult res;
  MaskSet seen;
  seen.insert(start);
  std::vector<std::uint64_t> stack{start};
  // Every column is a point subset S plus the normalisation row, so B^-1 A_j
  // is the sum of the B^-1 columns in S and the last one. The ratio test runs
  // over all 2^m subset masks at once, one lane per mask.
  std::vector<int> col_mask(cols, 0);
  for (int j = 0; j < cols; ++j)
    for (int r = 0; r < m; ++r)
      if (a(r, j) != 0.0) col_mask[j] |= 1 << r;
  const int masks = 1 << m;
  alignas(64) double U[8][64];
  const auto sweep = pick_ratio_sweep(masks);
  alignas(64) double best_num[64], best_den[64], best_row[64], tie[64];
  // [B | I | b] in a fixed 16-wide row so the eliminations vectorize.
  alignas(64) double t[8][16];
  double rhs[8];
  int bas[8];
  std::vector<std::uint64_t> pending;
  // The tableau of the base just processed. A popped base that differs from it
  // by one swap (usually the last neighbour pushed) is reached by a single
  // pivot; a fresh factorization every 32 chained pivots bounds the drift.
  std::uint64_t last = 0;
  int chain = 0;
  while (!stack.empty()) {
    const std::uint64_t mk = stack.back();
    stack.pop_back();
    if (++res.bases_visited > max_bases) throw std::runtime_error("oracle: too many bases");
    const std::uint64_t diff = mk ^ last;
    if (last != 0 && chain < 32 && __builtin_popcountll(diff) == 2) {
      const int enter = __builtin_ctzll(diff & mk);
      const int out = __builtin_ctzll(diff & last);
      int p = 0;
      while (bas[p] != out) ++p;
      double u[8];
      for (int k = 0; k < rows; ++k) u[k] = 0.0;
      for (int r = 0; r < rows; ++r)
        if (a(r, enter) != 0.0)
          for (int k = 0; k < rows; ++k) u[k] += t[k][rows + r];
      if (std::abs(u[p]) < 1e-12) throw std::runtime_error("oracle: singular pivot");
      const double scale = 1.0 / u[p];
      for (int q = 0; q < 16; ++q) t[p][q] *= scale;
      for (int k = 0; k < rows; ++k) {
        if (k == p || u[k] == 0.0) continue;
        const double f = u[k];
        for (int q = 0; q < 16; ++q) t[k][q] -= f * t[p][q];
      }
      bas[p] = enter;
      ++chain;
    } else {
      int nb = 0;
      for (int j = 0; j < cols; ++j)
        if ((mk >> j) & 1) bas[nb++] = j;
      for (int r = 0; r < rows; ++r) {
        for (int q = 0; q < 16; ++q) t[r][q] = 0.0;
        for (int k = 0; k < rows; ++k) t[r][k] = a(r, bas[k]);
        t[r][rows + r] = 1.0;
        t[r][15] = b[r];
      }
      for (int k = 0; k < rows; ++k) {
        int piv = k;
        for (int r = k + 1; r < rows; ++r)
          if (std::abs(t[r][k]) > std::abs(t[piv][k])) piv = r;
        if (std::abs(t[piv][k]) < 1e-12) throw std::runtime_error("oracle: singular basis");
        if (piv != k)
          for (int q = 0; q < 16; ++q) std::swap(t[k][q], t[piv][q]);
        const double scale = 1.0 / t[k][k];
        for (int q = 0; q < 16; ++q) t[k][q] *= scale;
        for (int r = 0; r < rows; ++r) {
          if (r == k) continue;
          const double f = t[r][k];
          if (f == 0.0) continue;
          for (int q = 0; q < 16; ++q) t[r][q] -= f * t[k][q];
        }
      }
      chain = 0;
    }
    last = mk;
    double obj = 0.0;
    for (int k = 0; k < rows; ++k) {
      rhs[k] = t[k][15];
      obj += c[bas[k]] * rhs[k];
    }
    res.value = std::min(res.value, obj);
    // U[k][S] = (B^-1)_{k,m} + sum_{i in S} (B^-1)_{k,i}, built by doubling.
    for (int k = 0; k < rows; ++k) {
      U[k][0] = t[k][rows + m];
      for (int i = 0; i < m; ++i) {
        const double add = t[k][rows + i];
        const int half = 1 << i;
        for (int q = 0; q < half; ++q) U[k][half + q] = U[k][q] + add;
      }
    }
    // Minimum ratio rhs_k / U[k][S] over U > tol, cross-multiplied; near ties
    // are flagged and settled lexicographically below.
    for (int q = 0; q < masks; ++q) best_num[q] = best_den[q] = tie[q] = 0.0, best_row[q] = -1.0;
    for (int k = 0; k < rows; ++k) sweep(U[k], rhs[k], k, masks, tol, best_num, best_den, best_row, tie);
    for (int j = 0; j < cols; ++j) {
      if ((mk >> j) & 1) continue;
      const int q = col_mask[j];
      if (best_den[q] == 0.0) continue;
      int leave = static_cast<int>(best_row[q]);
      if (tie_set(tie[q])) {
        // Lexicographic ratio test on (B^-1 b, B^-1) / u.
        leave = -1;
        for (int k = 0; k < rows; ++k) {
          const double uk = U[k][q];
          if (uk <= tol) continue;
          if (leave < 0) {
            leave = k;
            continue;
          }
          const double ul = U[leave][q];
          int cmp = 0;
          const double rk = rhs[k] / uk, rl = rhs[leave] / ul;
          if (std::abs(rk - rl) > 1e-12 * (1.0 + std::abs(rk))) cmp = rk < rl ? -1 : 1;
          for (int c2 = 0; c2 < rows && cmp == 0; ++c2) {
            const double ak = t[k][rows + c2] / uk, al = t[leave][rows + c2] / ul;
            if (std::abs(ak - al) > 1e-12 * (1.0 + std::abs(ak))) cmp = ak < al ? -1 : 1;
          }
          if (cmp < 0) leave = k;
        }
      }
      const std::uint64_t next = (mk & ~(std::uint64_t(1) << bas[leave])) | (std::uint64_t(1) << j);
      seen.prefetch(next);
      pending.push_back(next);
    }
    for (std::uint64_t next : pending)
      if (seen.insert(next)) stack.push_back(next);
    pending.clear();
  }
  return res;
}

} // namespace oracle
