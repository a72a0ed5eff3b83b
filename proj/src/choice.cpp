#include "qdu/choice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qdu {

namespace {

constexpr double kPi = std::numbers::pi;

CMatrix spectral(const CMatrix& basis, const std::vector<SignLabel>& labels, bool first) {
  const auto n = basis.rows();
  CMatrix o = CMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < basis.cols(); ++k) {
    const double s = first ? labels[k].o12 : labels[k].o34;
    o += s * basis.col(k) * basis.col(k).adjoint();
  }
  return o;
}

std::array<double, 4> cell_weights(const CVector& v, const CMatrix& basis, const std::vector<SignLabel>& labels) {
  std::array<double, 4> p{};
  for (Eigen::Index k = 0; k < basis.cols(); ++k)
    p[static_cast<int>(labels[k].cell())] += std::norm(basis.col(k).dot(v));
  return p;
}

// Multisets of three labels drawn from the four cells; three-distinct-cell
// sets come first since they are the ones that can reach interior targets.
std::vector<std::vector<SignLabel>> label_sets() {
  std::vector<std::vector<SignLabel>> distinct, repeated;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j)
      for (int k = j; k < 4; ++k) {
        std::vector<SignLabel> s{SignLabel::of(Cell(i)), SignLabel::of(Cell(j)), SignLabel::of(Cell(k))};
        (i < j && j < k ? distinct : repeated).push_back(std::move(s));
      }
  distinct.insert(distinct.end(), repeated.begin(), repeated.end());
  return distinct;
}

struct Decoded {
  CVector state;
  CMatrix basis;
};

class ChoiceSearch {
 public:
  explicit ChoiceSearch(Field field) : field_(field) {
    space_.add_angle("t");
    if (field == Field::Complex) {
      space_.add_angle("phase_y").add_angle("phase_b");
      for (const char* name : {"h00", "h11", "h22", "h01_re", "h01_im", "h02_re", "h02_im", "h12_re", "h12_im"})
        space_.add(name, -kPi, kPi);
    } else {
      for (const char* name : {"k01", "k02", "k12"}) space_.add(name, -kPi, kPi);
    }
  }

  const ParamSpace& space() const { return space_; }

  Decoded decode(std::span<const double> x) const {
    Decoded d;
    const double r = std::sqrt(1.0 / 3.0), s = std::sqrt(2.0 / 3.0);
    d.state = CVector(3);
    d.state(0) = r;
    if (field_ == Field::Complex) {
      d.state(1) = std::polar(s * std::cos(x[0]), x[1]);
      d.state(2) = std::polar(s * std::sin(x[0]), x[2]);
      CMatrix h(3, 3);
      h(0, 0) = x[3];
      h(1, 1) = x[4];
      h(2, 2) = x[5];
      h(0, 1) = Complex(x[6], x[7]);
      h(0, 2) = Complex(x[8], x[9]);
      h(1, 2) = Complex(x[10], x[11]);
      h(1, 0) = std::conj(h(0, 1));
      h(2, 0) = std::conj(h(0, 2));
      h(2, 1) = std::conj(h(1, 2));
      d.basis = UnitaryOperator::from_generator(HermitianOperator(h)).matrix();
    } else {
      d.state(1) = s * std::cos(x[0]);
      d.state(2) = s * std::sin(x[0]);
      // exp(K) for real antisymmetric K, as exp(i G) with G = -i K Hermitian.
      CMatrix g = CMatrix::Zero(3, 3);
      const double k01 = x[1], k02 = x[2], k12 = x[3];
      g(0, 1) = Complex(0, -k01);
      g(1, 0) = Complex(0, k01);
      g(0, 2) = Complex(0, -k02);
      g(2, 0) = Complex(0, k02);
      g(1, 2) = Complex(0, -k12);
      g(2, 1) = Complex(0, k12);
      d.basis = UnitaryOperator::from_generator(HermitianOperator(g)).matrix().real().cast<Complex>();
    }
    return d;
  }

 private:
  Field field_;
  ParamSpace space_;
};

struct SearchOutcome {
  ChoiceModel model;
  FitResult search;
  int restarts = 0;
};

SearchOutcome run_search(const RepresentabilityConstraints& c, std::uint64_t seed, const ChoiceFitOptions& options) {
  const ChoiceSearch search(c.field);
  const auto sets = label_sets();
  const int nsets = static_cast<int>(sets.size());
  const double stop = std::pow(options.tolerance * 1e-3, 2);

  std::optional<FitResult> best;
  int best_set = -1;
  int restarts = 0;
  for (int j = 0; j < nsets; ++j) {
    const int share = options.budget.restarts / nsets + (j < options.budget.restarts % nsets ? 1 : 0);
    if (share == 0) continue;
    const auto& labels = sets[j];
    Objective objective = [&](std::span<const double> x) {
      const Decoded d = search.decode(x);
      const auto p = cell_weights(d.state, d.basis, labels);
      const double f1 = p[0] + p[1], f4 = p[1] + p[3];
      double loss = (f1 - c.p_f1) * (f1 - c.p_f1) + (f4 - c.p_f4) * (f4 - c.p_f4);
      if (c.joint)
        for (int k = 0; k < 4; ++k) loss += (p[k] - c.joint->cells()[k]) * (p[k] - c.joint->cells()[k]);
      return loss;
    };
    SearchOptions so;
    so.target = 1e-20;
    so.execution = options.execution;
    FitResult fit = minimize(objective, search.space(), restart_seed(seed, 7919 + j), {share, options.budget.iterations}, so);
    restarts += share;
    if (!best || fit.value < best->value - 1e-15) {
      best = std::move(fit);
      best_set = j;
    }
    if (best->value <= stop) break;
  }

  const Decoded d = search.decode(best->params);
  const StateVector state = normalize(d.state);
  ChoiceObservablePair pair = build_commuting_pair(d.basis, sets[best_set]);
  JointDistribution joint = joint_distribution(state, pair);
  const ChoiceMarginals m = joint.marginals();
  FitResult fit = *best;
  fit.restarts_used = restarts;
  return {ChoiceModel{state, std::move(pair), joint, m}, std::move(fit), restarts};
}

}  // namespace

Cell SignLabel::cell() const noexcept {
  if (o12 > 0) return o34 > 0 ? Cell::F1F3 : Cell::F1F4;
  return o34 > 0 ? Cell::F2F3 : Cell::F2F4;
}

SignLabel SignLabel::of(Cell c) noexcept {
  switch (c) {
    case Cell::F1F3: return {1, 1};
    case Cell::F1F4: return {1, -1};
    case Cell::F2F3: return {-1, 1};
    case Cell::F2F4: return {-1, -1};
  }
  return {};
}

ChoiceMarginals choice_weights(const ChoiceData& data) {
  require(data.f1_f3 >= 0 && data.f1_f4 >= 0 && data.f2_f3 >= 0 && data.f2_f4 >= 0, ErrorKind::EmptyData,
          "negative count");
  const int total = data.total();
  require(total > 0, ErrorKind::EmptyData, "no participants");
  const double n = total;
  ChoiceMarginals m;
  m.f1 = (data.f1_f3 + data.f1_f4) / n;
  m.f2 = (data.f2_f3 + data.f2_f4) / n;
  m.f3 = (data.f1_f3 + data.f2_f3) / n;
  m.f4 = (data.f1_f4 + data.f2_f4) / n;
  return m;
}

JointDistribution::JointDistribution(std::array<double, 4> p) : p_(p) {
  double sum = 0.0;
  for (double& v : p_) {
    require(std::isfinite(v) && v >= -1e-12, ErrorKind::InvalidDistribution, "joint cell negative");
    v = std::max(0.0, v);
    sum += v;
  }
  require(std::abs(sum - 1.0) <= tol::kAlgebraic, ErrorKind::InvalidDistribution,
          "joint cells sum to " + std::to_string(sum));
}

JointDistribution JointDistribution::from_counts(const ChoiceData& data) {
  const int total = data.total();
  require(total > 0, ErrorKind::EmptyData, "no participants");
  const double n = total;
  return JointDistribution({data.f1_f3 / n, data.f1_f4 / n, data.f2_f3 / n, data.f2_f4 / n});
}

ChoiceMarginals JointDistribution::marginals() const noexcept {
  return {p_[0] + p_[1], p_[2] + p_[3], p_[0] + p_[2], p_[1] + p_[3]};
}

ChoiceObservablePair::ChoiceObservablePair(HermitianOperator o12, HermitianOperator o34, double bound)
    : o12_(std::move(o12)), o34_(std::move(o34)) {
  require(o12_.dim() == o34_.dim(), ErrorKind::DimensionMismatch, "choice observables differ in dimension");
  const CMatrix id = CMatrix::Identity(o12_.dim(), o12_.dim());
  require((o12_.matrix() * o12_.matrix() - id).cwiseAbs().maxCoeff() <= tol::kAlgebraic, ErrorKind::InvariantViolation,
          "O12^2 != I");
  require((o34_.matrix() * o34_.matrix() - id).cwiseAbs().maxCoeff() <= tol::kAlgebraic, ErrorKind::InvariantViolation,
          "O34^2 != I");
  const double comm = commutator_norm(o12_, o34_);
  if (comm > bound) fail(ErrorKind::NotCommuting, "commutator norm " + std::to_string(comm));
}

ChoiceObservablePair build_commuting_pair(const CMatrix& basis, std::vector<SignLabel> signs) {
  require(basis.rows() == basis.cols(), ErrorKind::BadBasis, "basis must be square");
  require(basis.rows() >= kMinDim && basis.rows() <= kMaxDim, ErrorKind::BadBasis, "basis dimension");
  require(static_cast<Eigen::Index>(signs.size()) == basis.cols(), ErrorKind::BadBasis, "one label per basis vector");
  for (const auto& s : signs)
    require((s.o12 == 1 || s.o12 == -1) && (s.o34 == 1 || s.o34 == -1), ErrorKind::BadBasis, "labels must be +/-1");
  const CMatrix gram = basis.adjoint() * basis;
  const double drift = (gram - CMatrix::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff();
  require(drift <= tol::kAlgebraic, ErrorKind::BadBasis, "basis not orthonormal, drift " + std::to_string(drift));
  ChoiceObservablePair pair(HermitianOperator(spectral(basis, signs, true)), HermitianOperator(spectral(basis, signs, false)),
                            1e-12);
  pair.basis_ = basis;
  pair.labels_ = std::move(signs);
  return pair;
}

JointDistribution joint_distribution(const StateVector& state, const ChoiceObservablePair& pair) {
  require(state.dim() == pair.o12().dim(), ErrorKind::DimensionMismatch, "state vs observables");
  const double comm = commutator_norm(pair.o12(), pair.o34());
  if (comm > tol::kAlgebraic) fail(ErrorKind::NotCommuting, "commutator norm " + std::to_string(comm));
  if (pair.basis()) return JointDistribution(cell_weights(state.amplitudes(), *pair.basis(), pair.labels()));

  const auto eb = common_eigenbasis(pair.o12(), pair.o34(), tol::kAlgebraic);
  CMatrix basis(state.dim(), state.dim());
  std::vector<SignLabel> labels;
  for (std::size_t k = 0; k < eb.size(); ++k) {
    basis.col(static_cast<Eigen::Index>(k)) = eb[k].vector;
    labels.push_back({eb[k].a_value > 0 ? 1 : -1, eb[k].b_value > 0 ? 1 : -1});
  }
  return JointDistribution(cell_weights(state.amplitudes(), basis, labels));
}

JointDistribution sequential_joint(const StateVector& state, const ChoiceObservablePair& pair, bool o12_first) {
  const int n = state.dim();
  const CMatrix id = CMatrix::Identity(n, n);
  auto proj = [&](const HermitianOperator& o, int s) -> CMatrix { return 0.5 * (id + s * o.matrix()); };
  std::array<double, 4> p{};
  for (const int s : {1, -1})
    for (const int t : {1, -1}) {
      const CMatrix first = o12_first ? proj(pair.o12(), s) : proj(pair.o34(), t);
      const CMatrix second = o12_first ? proj(pair.o34(), t) : proj(pair.o12(), s);
      p[static_cast<int>(SignLabel{s, t}.cell())] = (second * (first * state.amplitudes())).squaredNorm();
    }
  return JointDistribution(p);
}

std::string_view to_string(Field f) noexcept { return f == Field::Complex ? "complex" : "real"; }

Field parse_field(const std::string& text) {
  if (text == "complex") return Field::Complex;
  if (text == "real") return Field::Real;
  fail(ErrorKind::InvalidSpec, "unknown field '" + text + "'");
}

MarginalFit fit_marginals(double p_f1, double p_f4, std::uint64_t seed, const ChoiceFitOptions& options) {
  require(p_f1 > 0.0 && p_f1 < 1.0 && p_f4 > 0.0 && p_f4 < 1.0, ErrorKind::OutOfRange,
          "marginal targets must lie in (0, 1)");
  RepresentabilityConstraints c;
  c.p_f1 = p_f1;
  c.p_f4 = p_f4;
  c.field = options.field;
  auto out = run_search(c, seed, options);
  const double residual = std::max(std::abs(out.model.marginals.f1 - p_f1), std::abs(out.model.marginals.f4 - p_f4));
  if (!(residual <= options.tolerance))
    fail(ErrorKind::FitFailed, "marginal residual " + std::to_string(residual) + " after " +
                                   std::to_string(out.restarts) + " restarts");
  return {std::move(out.model), residual, options.field, std::move(out.search)};
}

L1JointFit min_l1_joint_fit(const JointDistribution& target) {
  const auto& p = target.cells();
  // Any distribution supported on the other three cells is at L1 distance
  // >= 2 p[d]; moving p[d] onto one kept cell attains it.
  int dropped = 0;
  for (int d = 1; d < 4; ++d)
    if (p[d] < p[dropped]) dropped = d;
  int receiver = dropped == 0 ? 1 : 0;
  for (int k = 0; k < 4; ++k)
    if (k != dropped && p[k] > p[receiver]) receiver = k;
  std::array<double, 4> q = p;
  q[receiver] += q[dropped];
  q[dropped] = 0.0;
  L1JointFit out;
  out.distance = 2.0 * p[dropped];
  out.dropped = Cell(dropped);
  for (int k = 0; k < 4; ++k) out.support[k] = k != dropped;
  out.best = JointDistribution(q);
  return out;
}

RepresentabilityReport real_representability_search(const RepresentabilityConstraints& constraints,
                                                    std::uint64_t seed, const ChoiceFitOptions& options) {
  auto out = run_search(constraints, seed, options);
  const auto& m = out.model.marginals;
  std::map<std::string, double> violations;
  violations["p_f1"] = std::abs(m.f1 - constraints.p_f1);
  violations["p_f4"] = std::abs(m.f4 - constraints.p_f4);
  violations["red"] = std::abs(out.model.state.weight(0) - 1.0 / 3.0);
  if (constraints.joint) {
    double l1 = 0.0;
    for (int k = 0; k < 4; ++k) l1 += std::abs(out.model.joint.cells()[k] - constraints.joint->cells()[k]);
    violations["joint_l1"] = l1;
  }
  double residual = 0.0;
  for (const auto& [name, v] : violations) residual = std::max(residual, v);
  return {constraints.field, residual, out.restarts, std::move(violations), std::move(out.model)};
}

}  // namespace qdu
