#include "cnslab/besov.hpp"

#include <algorithm>
#include <sstream>

#include "cnslab/fft.hpp"

namespace cnslab {

double lp_from_mag2(const double* mag2, std::size_t n, double cell, double p) {
  if (std::isinf(p)) {
    double m = 0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, mag2[i]);
    return std::sqrt(m);
  }
  if (p == 2.0) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += mag2[i];
    return std::sqrt(s * cell);
  }
  const double h = 0.5 * p;
  double s = 0;
  for (std::size_t i = 0; i < n; ++i) s += std::pow(mag2[i], h);
  return std::pow(s * cell, 1.0 / p);
}

namespace {

void accumulate_mag2(const double* v, std::size_t n, double* mag2) {
  for (std::size_t i = 0; i < n; ++i) mag2[i] += v[i] * v[i];
}

void require_nan_free(const SpectralField& f, const char* where) { require_finite(f, where); }

// Inverse transform of the weighted component c into dst.
template <class W>
void weighted_inverse(const SpectralField& f, int c, W&& w, AlignedVector<cplx>& tmp, double* dst) {
  const cplx* src = f.comp(c);
  for_each_mode(f.grid, [&](std::size_t i, const Mode& md) { tmp[i] = w(md.rho) * src[i]; });
  inverse_component(f.grid, tmp.data(), dst);
}

// Block norms of the joint magnitude of several fields, each block multiplier
// times an optional radial mask.
template <class Mask>
std::vector<double> joint_block_norms_impl(const std::vector<const SpectralField*>& fields, const DyadicPartition& part,
                                      const std::vector<double>& ps, Mask&& mask, int klo, int khi,
                                      std::vector<std::vector<double>>* out_all) {
  const GridSpec& g = part.grid();
  const std::size_t np = g.points();
  AlignedVector<cplx> tmp(g.modes());
  AlignedVector<double> phys(np), mag2(np);
  std::vector<std::vector<double>> res(ps.size(), std::vector<double>(part.blocks(), 0.0));
  for (int k = klo; k <= khi; ++k) {
    std::fill(mag2.begin(), mag2.end(), 0.0);
    auto w = [&](double r) { return part.block(k, r) * mask(r); };
    for (const SpectralField* f : fields)
      for (int c = 0; c < f->components; ++c) {
        weighted_inverse(*f, c, w, tmp, phys.data());
        accumulate_mag2(phys.data(), np, mag2.data());
      }
    for (std::size_t j = 0; j < ps.size(); ++j) res[j][k - part.k_min()] = lp_from_mag2(mag2.data(), np, g.cell_volume(), ps[j]);
  }
  if (out_all) *out_all = res;
  return res.front();
}

}  // namespace

std::vector<std::vector<double>> joint_block_norms(const std::vector<const SpectralField*>& fields,
                                                   const DyadicPartition& part, const std::vector<double>& ps,
                                                   Part which) {
  if (fields.empty() || ps.empty()) throw Error("joint_block_norms: nothing to measure");
  for (const auto* f : fields) {
    require_same_grid(f->grid, part.grid(), "joint_block_norms");
    require_nan_free(*f, "joint_block_norms");
  }
  std::vector<std::vector<double>> all;
  const int k0 = part.k0();
  if (which == Part::Full) {
    joint_block_norms_impl(fields, part, ps, [](double) { return 1.0; }, part.k_min(), part.k_max(), &all);
  } else {
    const bool low = which == Part::Low;
    auto rng = low ? part.low_range() : part.high_range();
    joint_block_norms_impl(
        fields, part, ps,
        [&](double r) {
          const double lo = part.low(k0, r);
          return low ? lo : 1.0 - lo;
        },
        rng.first, rng.second, &all);
  }
  return all;
}

double lp_norm(const RealField& f, double p) {
  const std::size_t np = f.grid.points();
  AlignedVector<double> mag2(np, 0.0);
  for (int c = 0; c < f.components; ++c) accumulate_mag2(f.comp(c), np, mag2.data());
  return lp_from_mag2(mag2.data(), np, f.grid.cell_volume(), p);
}

std::vector<double> block_norms(const SpectralField& f, const DyadicPartition& part, double p) {
  require_same_grid(f.grid, part.grid(), "block_norms");
  require_nan_free(f, "block_norms");
  return joint_block_norms_impl({&f}, part, {p}, [](double) { return 1.0; }, part.k_min(), part.k_max(), nullptr);
}

double besov_sum(const std::vector<double>& a, int kmin, double s, double r) {
  if (std::isinf(r)) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::exp2(s * (kmin + static_cast<int>(i))) * a[i]);
    return m;
  }
  double acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double v = std::exp2(s * (kmin + static_cast<int>(i))) * a[i];
    acc += (r == 1.0) ? v : std::pow(v, r);
  }
  return (r == 1.0) ? acc : std::pow(acc, 1.0 / r);
}

double besov_norm(const SpectralField& f, const BesovIndex& idx) {
  return besov_norm(f, idx, DyadicPartition(f.grid));
}

double besov_norm(const SpectralField& f, const BesovIndex& idx, const DyadicPartition& part) {
  if (!(idx.p >= 1) || !(idx.r >= 1)) throw Error("besov_norm: p and r must lie in [1, inf]");
  return besov_sum(block_norms(f, part, idx.p), part.k_min(), idx.s, idx.r);
}

double hardy_norm(const SpectralField& f) { return hardy_norm(f, DyadicPartition(f.grid)); }

double hardy_norm(const SpectralField& f, const DyadicPartition& part) {
  if (f.components != 1) throw Error("hardy_norm: scalar field required");
  require_nan_free(f, "hardy_norm");
  const GridSpec& g = f.grid;
  const std::size_t np = g.points();
  AlignedVector<cplx> tmp(g.modes());
  AlignedVector<double> phys(np), sq(np, 0.0);
  for (int k = part.k_min(); k <= part.k_max(); ++k) {
    weighted_inverse(f, 0, [&](double r) { return part.block(k, r); }, tmp, phys.data());
    accumulate_mag2(phys.data(), np, sq.data());
  }
  return lp_from_mag2(sq.data(), np, g.cell_volume(), 1.0);
}

IndexCheck validate_index_pair(double q, double p) {
  auto fmt = [](const char* s) { return IndexCheck{false, s}; };
  if (!(p >= 2)) return fmt("2 <= p fails");
  if (!(p < 6)) return fmt("p < 6 fails");
  if (!(q >= 2)) return fmt("2 <= q fails");
  if (!(q <= p)) return fmt("q <= p fails");
  if (!(p <= 2 * q)) return fmt("p <= 2q fails");
  if (!(3.0 / q - 3.0 / p <= 1.0)) return fmt("3/q - 3/p <= 1 fails");
  if (!(1.0 < 2.0 / q + 3.0 / p)) return fmt("1 < 2/q + 3/p fails");
  return {};
}

const char* part_name(Part p) {
  switch (p) {
    case Part::Full: return "full";
    case Part::Low: return "low";
    case Part::High: return "high";
  }
  return "?";
}

std::string NormTracker::key(const std::string& field, Part part, double p) {
  std::ostringstream os;
  os.precision(17);
  os << field << '|' << part_name(part) << '|' << p;
  return os.str();
}

void NormTracker::add_sample(double t) {
  if (!times_.empty() && !(t > times_.back())) throw Error("NormTracker: sample times must be strictly increasing");
  times_.push_back(t);
}

void NormTracker::record(const std::string& field, Part part, double p, std::vector<double> norms) {
  if (times_.empty()) throw Error("NormTracker: record before add_sample");
  if (static_cast<int>(norms.size()) != kmax_ - kmin_ + 1) throw Error("NormTracker: block count mismatch");
  for (double v : norms)
    if (!(v >= 0) || !std::isfinite(v)) throw Error("NormTracker: norms must be finite and nonnegative");
  auto& s = data_[key(field, part, p)];
  if (s.size() + 1 != times_.size()) throw Error("NormTracker: series " + key(field, part, p) + " out of step");
  s.push_back(std::move(norms));
}

bool NormTracker::has(const std::string& field, Part part, double p) const { return data_.count(key(field, part, p)) > 0; }

const std::vector<std::vector<double>>& NormTracker::series(const std::string& field, Part part, double p) const {
  auto it = data_.find(key(field, part, p));
  if (it == data_.end()) throw Error("NormTracker: no series " + key(field, part, p) + " (missing low/high split?)");
  if (it->second.size() != times_.size()) throw Error("NormTracker: series " + it->first + " incomplete");
  return it->second;
}

std::vector<std::string> NormTracker::keys() const {
  std::vector<std::string> k;
  for (const auto& kv : data_) k.push_back(kv.first);
  return k;
}

NormTracker NormTracker::truncated(double t_end) const {
  NormTracker t(kmin_, kmax_, k0_);
  std::size_t n = 0;
  while (n < times_.size() && times_[n] <= t_end) ++n;
  t.times_.assign(times_.begin(), times_.begin() + n);
  for (const auto& kv : data_) t.data_[kv.first].assign(kv.second.begin(), kv.second.begin() + std::min(n, kv.second.size()));
  return t;
}

std::vector<double> NormTracker::trapezoid_weights() const {
  const std::size_t n = times_.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = times_[i + 1] - times_[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

namespace {

void check_tracker(const NormTracker& tr, double rho) {
  if (tr.samples() < 2) throw Error("chemin_lerner_norm: at least 2 samples required");
  for (std::size_t i = 1; i < tr.times().size(); ++i)
    if (!(tr.times()[i] > tr.times()[i - 1])) throw Error("chemin_lerner_norm: unsorted times");
  if (!(rho >= 1)) throw Error("chemin_lerner_norm: rho must lie in [1, inf]");
}

double time_norm(const std::vector<double>& vals, const std::vector<double>& w, double rho) {
  if (std::isinf(rho)) return *std::max_element(vals.begin(), vals.end());
  double s = 0;
  for (std::size_t i = 0; i < vals.size(); ++i) s += w[i] * (rho == 1.0 ? vals[i] : std::pow(vals[i], rho));
  return rho == 1.0 ? s : std::pow(s, 1.0 / rho);
}

}  // namespace

double chemin_lerner_norm(const NormTracker& tr, const std::string& field, Part part, const BesovIndex& idx,
                          double rho) {
  check_tracker(tr, rho);
  const auto& s = tr.series(field, part, idx.p);
  const auto w = tr.trapezoid_weights();
  const int nb = tr.k_max() - tr.k_min() + 1;
  std::vector<double> per(nb), col(tr.samples());
  for (int b = 0; b < nb; ++b) {
    for (std::size_t i = 0; i < tr.samples(); ++i) col[i] = s[i][b];
    per[b] = time_norm(col, w, rho);
  }
  return besov_sum(per, tr.k_min(), idx.s, idx.r);
}

double standard_time_space_norm(const NormTracker& tr, const std::string& field, Part part, const BesovIndex& idx,
                                double rho) {
  check_tracker(tr, rho);
  const auto& s = tr.series(field, part, idx.p);
  const auto w = tr.trapezoid_weights();
  std::vector<double> vals(tr.samples());
  for (std::size_t i = 0; i < tr.samples(); ++i) vals[i] = besov_sum(s[i], tr.k_min(), idx.s, idx.r);
  return time_norm(vals, w, rho);
}

namespace {

void require_pair(const IndexPair& pair) {
  IndexCheck c = validate_index_pair(pair.q, pair.p);
  if (!c.accepted) throw Error("index pair rejected: " + c.reason);
}

}  // namespace

HybridComponents hybrid_X_components(const NormTracker& tr, const IndexPair& pair) {
  require_pair(pair);
  const double q = pair.q, p = pair.p;
  HybridComponents h;
  h.low_inf = chemin_lerner_norm(tr, tracked::kAU, Part::Low, {-1 + 3 / q, q, 1}, kInf);
  h.low_2 = chemin_lerner_norm(tr, tracked::kAU, Part::Low, {-1 + 5 / q, q, 1}, 2);
  h.low_1 = chemin_lerner_norm(tr, tracked::kAU, Part::Low, {5 / q, q, 1}, 1);
  h.a_high_inf = chemin_lerner_norm(tr, tracked::kA, Part::High, {3 / p, p, 1}, kInf);
  h.a_high_1 = chemin_lerner_norm(tr, tracked::kA, Part::High, {3 / p, p, 1}, 1);
  h.u_high_inf = chemin_lerner_norm(tr, tracked::kU, Part::High, {-1 + 3 / p, p, 1}, kInf);
  h.u_high_1 = chemin_lerner_norm(tr, tracked::kU, Part::High, {1 + 3 / p, p, 1}, 1);
  return h;
}

double hybrid_X_norm(const NormTracker& tr, const IndexPair& pair) { return hybrid_X_components(tr, pair).total(); }

YComponents hybrid_Y_components(const NormTracker& tr, const IndexPair& pair) {
  require_pair(pair);
  const double q = pair.q, p = pair.p;
  YComponents y;
  y.low_inf = chemin_lerner_norm(tr, tracked::kM, Part::Low, {-1 + 3 / q, q, 1}, kInf);
  y.low_2 = chemin_lerner_norm(tr, tracked::kM, Part::Low, {-1 + 5 / q, q, 1}, 2);
  y.low_1 = chemin_lerner_norm(tr, tracked::kM, Part::Low, {5 / q, q, 1}, 1);
  y.high_inf = chemin_lerner_norm(tr, tracked::kM, Part::High, {-1 + 3 / p, p, 1}, kInf);
  y.high_1 = chemin_lerner_norm(tr, tracked::kM, Part::High, {3 / p, p, 1}, 1);
  return y;
}

double hybrid_Y_norm(const NormTracker& tr, const IndexPair& pair) { return hybrid_Y_components(tr, pair).total(); }

double u_low_functional(const NormTracker& tr, const IndexPair& pair) {
  require_pair(pair);
  const double q = pair.q;
  return chemin_lerner_norm(tr, tracked::kU, Part::Low, {-1 + 3 / q, q, 1}, kInf) +
         chemin_lerner_norm(tr, tracked::kU, Part::Low, {-1 + 5 / q, q, 1}, 2) +
         chemin_lerner_norm(tr, tracked::kU, Part::Low, {5 / q, q, 1}, 1);
}

X0Parts X0_parts(const SpectralField& a0, const SpectralField& u0, const SpectralField* m0, const IndexPair& pair,
                 const DyadicPartition& part) {
  require_pair(pair);
  require_same_grid(a0.grid, part.grid(), "X0_norm");
  require_same_grid(u0.grid, part.grid(), "X0_norm");
  SpectralField mloc;
  const bool a0_zero = std::all_of(a0.data.begin(), a0.data.end(), [](cplx z) { return z == cplx(0.0); });
  if (!m0 && a0_zero) m0 = &u0;  // keeps the spectral support of u0 exact
  if (!m0) {
    RealField a = inverse(a0), u = inverse(u0);
    RealField m(u.grid, u.components);
    const std::size_t np = a.grid.points();
    for (int c = 0; c < u.components; ++c)
      for (std::size_t i = 0; i < np; ++i) m.comp(c)[i] = (1.0 + a.data[i]) * u.comp(c)[i];
    mloc = transform(m);
    m0 = &mloc;
  }
  const int k0 = part.k0();
  auto lowmask = [&](double r) { return part.low(k0, r); };
  auto highmask = [&](double r) { return 1.0 - part.low(k0, r); };
  const double q = pair.q, p = pair.p;
  auto [llo, lhi] = part.low_range();
  auto [hlo, hhi] = part.high_range();
  X0Parts x;
  x.low = besov_sum(joint_block_norms_impl({&a0, m0}, part, {q}, lowmask, llo, lhi, nullptr), part.k_min(), -3 + 7 / q, 1);
  x.a_high = besov_sum(joint_block_norms_impl({&a0}, part, {p}, highmask, hlo, hhi, nullptr), part.k_min(), 3 / p, 1);
  x.u_high = besov_sum(joint_block_norms_impl({&u0}, part, {p}, highmask, hlo, hhi, nullptr), part.k_min(), -1 + 3 / p, 1);
  return x;
}

double X0_norm(const SpectralField& a0, const SpectralField& u0, const SpectralField* m0, const IndexPair& pair,
               const DyadicPartition& part) {
  return X0_parts(a0, u0, m0, pair, part).total();
}

BlockSampler::BlockSampler(const DyadicPartition& part, TrackRequest req) : part_(part), req_(req) {}

NormTracker BlockSampler::make_tracker() const { return NormTracker(part_.k_min(), part_.k_max(), part_.k0()); }

void BlockSampler::sample(NormTracker& tr, double t, const SpectralField& a, const SpectralField& u,
                          const SpectralField* m) const {
  const GridSpec& g = part_.grid();
  const std::size_t np = g.points();
  const int nb = part_.blocks();
  const int k0 = part_.k0();
  const bool use_m = req_.track_m && m;
  std::vector<double> qs, ps;
  for (const auto& pr : req_.pairs) {
    if (std::find(qs.begin(), qs.end(), pr.q) == qs.end()) qs.push_back(pr.q);
    if (std::find(ps.begin(), ps.end(), pr.p) == ps.end()) ps.push_back(pr.p);
  }
  if (qs.empty()) throw Error("BlockSampler: no index pair requested");
  AlignedVector<cplx> tmp(g.modes());
  AlignedVector<double> phys(np), ma(np), mu(np), mm(np), mau(np);
  const double cell = g.cell_volume();

  using Table = std::vector<std::vector<double>>;  // [index][block]
  Table au_low(qs.size(), std::vector<double>(nb, 0.0)), u_low = au_low, m_low = au_low;
  Table a_high(ps.size(), std::vector<double>(nb, 0.0)), u_high = a_high, m_high = a_high;
  auto run = [&](Part which) {
    auto [klo, khi] = which == Part::Low ? part_.low_range() : part_.high_range();
    for (int k = klo; k <= khi; ++k) {
      auto w = [&](double r) {
        const double lo = part_.low(k0, r);
        return part_.block(k, r) * (which == Part::Low ? lo : 1.0 - lo);
      };
      std::fill(ma.begin(), ma.end(), 0.0);
      std::fill(mu.begin(), mu.end(), 0.0);
      std::fill(mm.begin(), mm.end(), 0.0);
      weighted_inverse(a, 0, w, tmp, phys.data());
      accumulate_mag2(phys.data(), np, ma.data());
      for (int c = 0; c < u.components; ++c) {
        weighted_inverse(u, c, w, tmp, phys.data());
        accumulate_mag2(phys.data(), np, mu.data());
      }
      if (use_m)
        for (int c = 0; c < m->components; ++c) {
          weighted_inverse(*m, c, w, tmp, phys.data());
          accumulate_mag2(phys.data(), np, mm.data());
        }
      const int b = k - part_.k_min();
      if (which == Part::Low) {
        for (std::size_t i = 0; i < np; ++i) mau[i] = ma[i] + mu[i];
        for (std::size_t j = 0; j < qs.size(); ++j) {
          au_low[j][b] = lp_from_mag2(mau.data(), np, cell, qs[j]);
          u_low[j][b] = lp_from_mag2(mu.data(), np, cell, qs[j]);
          if (use_m) m_low[j][b] = lp_from_mag2(mm.data(), np, cell, qs[j]);
        }
      } else {
        for (std::size_t j = 0; j < ps.size(); ++j) {
          a_high[j][b] = lp_from_mag2(ma.data(), np, cell, ps[j]);
          u_high[j][b] = lp_from_mag2(mu.data(), np, cell, ps[j]);
          if (use_m) m_high[j][b] = lp_from_mag2(mm.data(), np, cell, ps[j]);
        }
      }
    }
  };
  run(Part::Low);
  run(Part::High);
  tr.add_sample(t);
  for (std::size_t j = 0; j < qs.size(); ++j) {
    tr.record(tracked::kAU, Part::Low, qs[j], au_low[j]);
    if (req_.track_u_low) tr.record(tracked::kU, Part::Low, qs[j], u_low[j]);
    if (use_m) tr.record(tracked::kM, Part::Low, qs[j], m_low[j]);
  }
  for (std::size_t j = 0; j < ps.size(); ++j) {
    tr.record(tracked::kA, Part::High, ps[j], a_high[j]);
    tr.record(tracked::kU, Part::High, ps[j], u_high[j]);
    if (use_m) tr.record(tracked::kM, Part::High, ps[j], m_high[j]);
  }
}

}  // namespace cnslab
