#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cnslab/dyadic.hpp"

namespace cnslab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct BesovIndex {
  double s = 0;
  double p = 2;
  double r = 1;
};

// L^p norm of a field given its pointwise squared magnitude.
double lp_from_mag2(const double* mag2, std::size_t n, double cell, double p);
// L^p norm of the pointwise Euclidean magnitude of a (vector) field.
double lp_norm(const RealField& f, double p);

// ||Delta_k f||_{L^p} for every block, vector fields measured by |f|.
std::vector<double> block_norms(const SpectralField& f, const DyadicPartition& part, double p);

enum class Part { Full, Low, High };
const char* part_name(Part p);

// Block norms of the pointwise Euclidean magnitude of several fields jointly,
// for several p at once: result[j][k - kmin]. Low/High restrict to the split at
// part.k0() before localizing.
std::vector<std::vector<double>> joint_block_norms(const std::vector<const SpectralField*>& fields,
                                                   const DyadicPartition& part, const std::vector<double>& ps,
                                                   Part which = Part::Full);

// Weighted sequence norm (sum_k (2^{ks} a_k)^r)^{1/r}; a[k - kmin].
double besov_sum(const std::vector<double>& a, int kmin, double s, double r);

double besov_norm(const SpectralField& f, const BesovIndex& idx);
double besov_norm(const SpectralField& f, const BesovIndex& idx, const DyadicPartition& part);

double hardy_norm(const SpectralField& f);
double hardy_norm(const SpectralField& f, const DyadicPartition& part);

struct IndexCheck {
  bool accepted = true;
  std::string reason;
};
IndexCheck validate_index_pair(double q, double p);

struct IndexPair {
  double q = 2;
  double p = 4;
};

// Per-block L^p norms of tracked fields sampled along a trajectory.
class NormTracker {
 public:
  NormTracker() = default;
  NormTracker(int kmin, int kmax, int k0) : kmin_(kmin), kmax_(kmax), k0_(k0) {}

  int k_min() const { return kmin_; }
  int k_max() const { return kmax_; }
  int k0() const { return k0_; }

  void add_sample(double t);
  // Norms for the sample most recently added; blocks indexed k - kmin.
  void record(const std::string& field, Part part, double p, std::vector<double> norms);

  const std::vector<double>& times() const { return times_; }
  std::size_t samples() const { return times_.size(); }
  bool has(const std::string& field, Part part, double p) const;
  // [sample][block]
  const std::vector<std::vector<double>>& series(const std::string& field, Part part, double p) const;
  std::vector<std::string> keys() const;

  // Copy restricted to samples with t <= t_end.
  NormTracker truncated(double t_end) const;

  // Trapezoid weights for the sample times.
  std::vector<double> trapezoid_weights() const;

 private:
  static std::string key(const std::string& field, Part part, double p);
  int kmin_ = 0, kmax_ = 0, k0_ = 0;
  std::vector<double> times_;
  std::map<std::string, std::vector<std::vector<double>>> data_;
};

// sum_k 2^{ks} (int ||Delta_k z||^rho dt)^{1/rho} (l^r over k for general r).
double chemin_lerner_norm(const NormTracker& tr, const std::string& field, Part part, const BesovIndex& idx,
                          double rho);
// ( int (sum_k 2^{ks} ||Delta_k z||)^rho dt )^{1/rho}, the time-outside ordering (r = 1).
double standard_time_space_norm(const NormTracker& tr, const std::string& field, Part part, const BesovIndex& idx,
                                double rho);

// Chemin-Lerner components of the hybrid functionals.
struct HybridComponents {
  double low_inf = 0, low_2 = 0, low_1 = 0;
  double a_high_inf = 0, a_high_1 = 0;
  double u_high_inf = 0, u_high_1 = 0;
  double total() const { return low_inf + low_2 + low_1 + a_high_inf + a_high_1 + u_high_inf + u_high_1; }
};

// Tracked field names used by the hybrid norms.
namespace tracked {
inline const std::string kAU = "au";  // joint (a,u), pointwise Euclidean magnitude
inline const std::string kA = "a";
inline const std::string kU = "u";
inline const std::string kM = "m";
}  // namespace tracked

HybridComponents hybrid_X_components(const NormTracker& tr, const IndexPair& pair);
double hybrid_X_norm(const NormTracker& tr, const IndexPair& pair);

struct YComponents {
  double low_inf = 0, low_2 = 0, low_1 = 0;
  double high_inf = 0, high_1 = 0;
  double low() const { return low_inf + low_2 + low_1; }
  double total() const { return low() + high_inf + high_1; }
};
YComponents hybrid_Y_components(const NormTracker& tr, const IndexPair& pair);
double hybrid_Y_norm(const NormTracker& tr, const IndexPair& pair);
// Low-frequency functional of u with the same three components as Y^l.
double u_low_functional(const NormTracker& tr, const IndexPair& pair);

struct X0Parts {
  double low = 0;   // ||(a0,m0)^l|| in B^{-3+7/q}_{q,1}
  double a_high = 0;  // ||a0^h|| in B^{3/p}_{p,1}
  double u_high = 0;  // ||u0^h|| in B^{-1+3/p}_{p,1}
  double total() const { return low + a_high + u_high; }
};
// m0 = (1+a0)u0 when not supplied.
X0Parts X0_parts(const SpectralField& a0, const SpectralField& u0, const SpectralField* m0, const IndexPair& pair,
                 const DyadicPartition& part);
double X0_norm(const SpectralField& a0, const SpectralField& u0, const SpectralField* m0, const IndexPair& pair,
               const DyadicPartition& part);

// Computes per-block norms of a state's fields for a trajectory tracker.
struct TrackRequest {
  std::vector<IndexPair> pairs{IndexPair{}};  // every low q and high p is recorded
  bool track_m = true;
  bool track_u_low = true;
};

class BlockSampler {
 public:
  BlockSampler(const DyadicPartition& part, TrackRequest req);
  // a: scalar, u and m: vector spectral fields (m may be null when not tracked).
  void sample(NormTracker& tr, double t, const SpectralField& a, const SpectralField& u, const SpectralField* m) const;
  NormTracker make_tracker() const;

 private:
  DyadicPartition part_;
  TrackRequest req_;
};

}  // namespace cnslab
