// Copyright 2026 The FilterDDP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "filterddp/benchmarks.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/AutoDiff>

namespace filterddp {

double BenchmarkSpec::param(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) {
    throw InputError("benchmark '" + name + "' has no parameter '" + key + "'");
  }
  return it->second;
}

std::vector<std::string> benchmark_names() {
  return {"eqlq",    "pendulum",          "pendulum_bounded", "cartpole",
          "cartpole_friction", "acrobot", "acrobot_contact"};
}

BenchmarkSpec default_spec(const std::string& name) {
  constexpr double kPi = std::numbers::pi;
  BenchmarkSpec s;
  s.name = name;
  if (name == "eqlq") {
    s.N = 5;
    s.seed = 1;
    s.params = {{"nx", 2}, {"nu", 2}, {"nc", 1}};
    return s;
  }
  if (name == "pendulum" || name == "pendulum_bounded") {
    s.params = {{"mass", 1.0},     {"length", 1.0},    {"gravity", 9.81},
                {"damping", 0.1},  {"w_torque", 0.1},  {"w_terminal", 5e4},
                {"goal_angle", kPi},
                {"torque_shift", name == "pendulum_bounded" ? 3.0 : 0.0}};
    s.ranges = {{"mass", {0.8, 1.2}}, {"length", {0.8, 1.2}}};
    return s;
  }
  if (name == "cartpole" || name == "cartpole_friction") {
    s.params = {{"mass_cart", 1.0},  {"mass_pole", 0.2}, {"length", 0.5},
                {"gravity", 9.81},   {"mu_cart", 0.1},   {"mu_pole", 0.1},
                {"kappa", 1e-7},     {"w_force", 0.1},   {"w_state", 0.0},
                {"w_terminal", 3.0}, {"interpolate", 0.0},
                {"friction", name == "cartpole_friction" ? 1.0 : 0.0}};
    s.ranges = {{"mass_cart", {0.8, 1.2}},
                {"mass_pole", {0.15, 0.25}},
                {"length", {0.4, 0.6}},
                {"mu_cart", {0.01, 0.3}},
                {"mu_pole", {0.01, 0.3}}};
    return s;
  }
  if (name == "acrobot" || name == "acrobot_contact") {
    s.params = {{"mass1", 1.0},      {"mass2", 1.0},      {"length1", 1.0},
                {"length2", 1.0},    {"gravity", 9.81},   {"limit", kPi / 2},
                {"kappa", 1e-7},     {"w_torque", 1.0},   {"w_state", 0.0},
                {"w_terminal", 1.0}, {"interpolate", 0.0},
                {"contact", name == "acrobot_contact" ? 1.0 : 0.0}};
    s.ranges = {{"length1", {0.8, 1.2}}, {"length2", {0.8, 1.2}}};
    return s;
  }
  throw InputError("unknown problem '" + name + "'");
}

std::vector<BenchmarkSpec> randomize(const BenchmarkSpec& spec, int k) {
  require(k >= 1, "randomize: k must be at least 1");
  std::vector<BenchmarkSpec> out;
  out.reserve(k);
  out.push_back(spec);
  for (int i = 1; i < k; ++i) {
    BenchmarkSpec s = spec;
    s.seed = spec.seed + static_cast<std::uint64_t>(i);
    std::mt19937_64 rng(s.seed);
    for (const auto& [key, range] : spec.ranges) {
      std::uniform_real_distribution<double> draw(range.first, range.second);
      s.params[key] = draw(rng);
    }
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Linear-quadratic problems.

LqModel::LqModel(Dims dims, VectorXd x_init, std::vector<Stage> stages)
    : dims_(dims), x_init_(std::move(x_init)), stages_(std::move(stages)) {
  dims_.validate();
  require(x_init_.size() == dims_.nx, "LqModel: initial state has wrong size");
  require(static_cast<int>(stages_.size()) == dims_.N,
          "LqModel: one stage per time step required");
  const int nx = dims_.nx, nu = dims_.nu, nc = dims_.nc;
  for (const Stage& s : stages_) {
    require(s.A.rows() == nx && s.A.cols() == nx && s.B.rows() == nx &&
                s.B.cols() == nu && s.e.size() == nx &&
                s.W.rows() == nx + nu && s.W.cols() == nx + nu &&
                s.q.size() == nx && s.r.size() == nu && s.C.rows() == nc &&
                s.C.cols() == nx && s.D.rows() == nc && s.D.cols() == nu &&
                s.d.size() == nc,
            "LqModel: stage data has inconsistent shapes");
  }
}

double LqModel::cost(int t, const VectorXd& x, const VectorXd& u) const {
  const Stage& s = stage(t);
  VectorXd z(dims_.nx + dims_.nu);
  z << x, u;
  return 0.5 * z.dot(s.W * z) + s.q.dot(x) + s.r.dot(u);
}

VectorXd LqModel::dynamics(int t, const VectorXd& x, const VectorXd& u) const {
  const Stage& s = stage(t);
  return s.A * x + s.B * u + s.e;
}

VectorXd LqModel::constraints(int t, const VectorXd& x,
                              const VectorXd& u) const {
  const Stage& s = stage(t);
  return s.C * x + s.D * u + s.d;
}

ScalarDerivatives LqModel::cost_derivatives(int t, const VectorXd& x,
                                            const VectorXd& u) const {
  const Stage& s = stage(t);
  const int nx = dims_.nx, nu = dims_.nu;
  ScalarDerivatives out;
  out.value = cost(t, x, u);
  out.xx = s.W.topLeftCorner(nx, nx);
  out.ux = s.W.bottomLeftCorner(nu, nx);
  out.uu = s.W.bottomRightCorner(nu, nu);
  out.x = out.xx * x + out.ux.transpose() * u + s.q;
  out.u = out.ux * x + out.uu * u + s.r;
  return out;
}

VectorDerivatives LqModel::dynamics_derivatives(int t, const VectorXd& x,
                                                const VectorXd& u) const {
  const Stage& s = stage(t);
  return {dynamics(t, x, u), s.A, s.B, {}, {}, {}};
}

VectorDerivatives LqModel::constraint_derivatives(int t, const VectorXd& x,
                                                  const VectorXd& u) const {
  const Stage& s = stage(t);
  return {constraints(t, x, u), s.C, s.D, {}, {}, {}};
}

std::shared_ptr<const LqModel> build_eqlq(std::uint64_t seed, int N, int nx,
                                          int nu, int nc) {
  const Dims dims{N, nx, nu, nc};
  dims.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto gaussian = [&](int rows, int cols) {
    MatrixXd m(rows, cols);
    for (int j = 0; j < cols; ++j) {
      for (int i = 0; i < rows; ++i) {
        m(i, j) = normal(rng);
      }
    }
    return m;
  };

  std::vector<LqModel::Stage> stages(N);
  for (auto& s : stages) {
    s.A = MatrixXd::Identity(nx, nx) + 0.2 * gaussian(nx, nx);
    s.B = 0.5 * gaussian(nx, nu);
    s.e = 0.1 * gaussian(nx, 1);
    const MatrixXd G = gaussian(nx + nu, nx + nu);
    s.W = G.transpose() * G / (nx + nu) +
          0.5 * MatrixXd::Identity(nx + nu, nx + nu);
    s.q = gaussian(nx, 1);
    s.r = gaussian(nu, 1);
    s.C = 0.5 * gaussian(nc, nx);
    do {
      s.D = gaussian(nc, nu);
    } while (nc > 0 &&
             Eigen::JacobiSVD<MatrixXd>(s.D).singularValues().minCoeff() < 0.1);
    s.d = gaussian(nc, 1);
  }
  VectorXd x_init = gaussian(nx, 1);
  return std::make_shared<const LqModel>(dims, std::move(x_init),
                                         std::move(stages));
}

Iterate stacked_kkt_oracle(const OcpModel& model) {
  const Dims d = model.dims();
  d.validate();
  const int N = d.N, nx = d.nx, nu = d.nu, nc = d.nc;
  const int ny = N * (nx + nu);
  const int nm = N * (nx + nc);
  auto xi = [&](int t) { return t * nx; };
  auto ui = [&](int t) { return N * nx + t * nu; };
  auto lam = [&](int t) { return ny + t * nx; };
  auto phi = [&](int t) { return ny + N * nx + t * nc; };

  MatrixXd K = MatrixXd::Zero(ny + nm, ny + nm);
  VectorXd rhs = VectorXd::Zero(ny + nm);
  const VectorXd x0 = VectorXd::Zero(nx);
  const VectorXd u0 = VectorXd::Zero(nu);

  // Constraint rows, with J placed below and J^T to the right of H.
  auto put_jac = [&](int row, int col, const MatrixXd& block) {
    K.block(row, col, block.rows(), block.cols()) += block;
    K.block(col, row, block.cols(), block.rows()) += block.transpose();
  };
  const MatrixXd I = MatrixXd::Identity(nx, nx);
  put_jac(lam(0), xi(0), -I);
  rhs.segment(lam(0), nx) = -model.initial_state();

  for (int t = 0; t < N; ++t) {
    const ScalarDerivatives l = model.cost_derivatives(t, x0, u0);
    K.block(xi(t), xi(t), nx, nx) += l.xx;
    K.block(ui(t), ui(t), nu, nu) += l.uu;
    K.block(ui(t), xi(t), nu, nx) += l.ux;
    K.block(xi(t), ui(t), nx, nu) += l.ux.transpose();
    rhs.segment(xi(t), nx) -= l.x;
    rhs.segment(ui(t), nu) -= l.u;

    if (t + 1 < N) {
      const VectorDerivatives f = model.dynamics_derivatives(t, x0, u0);
      put_jac(lam(t + 1), xi(t), f.x);
      put_jac(lam(t + 1), ui(t), f.u);
      put_jac(lam(t + 1), xi(t + 1), -I);
      rhs.segment(lam(t + 1), nx) = -f.value;
    }
    if (nc > 0) {
      const VectorDerivatives c = model.constraint_derivatives(t, x0, u0);
      put_jac(phi(t), xi(t), c.x);
      put_jac(phi(t), ui(t), c.u);
      rhs.segment(phi(t), nc) = -c.value;
    }
  }

  const Eigen::FullPivLU<MatrixXd> lu(K);
  if (lu.rank() < K.rows()) {
    throw SingularityError("stacked_kkt_oracle: KKT matrix is singular");
  }
  const VectorXd sol = lu.solve(rhs);

  Iterate w = Iterate::zeros(d);
  for (int t = 0; t < N; ++t) {
    w.x[t] = sol.segment(xi(t), nx);
    w.u[t] = sol.segment(ui(t), nu);
    w.lambda[t] = sol.segment(lam(t), nx);
    w.phi[t] = sol.segment(phi(t), nc);
  }
  refresh_merit(model, w, 0.0);
  return w;
}

// ---------------------------------------------------------------------------
// Nonlinear models with linear "shift" dynamics and implicit constraints.

namespace {

template <class T, int n>
using Vec = Eigen::Matrix<T, n, 1>;
template <class T>
using Mat2 = Eigen::Matrix<T, 2, 2>;

/**
 * Base for models whose dynamics are a fixed linear selection of (x, u) and
 * whose physics lives in the stage constraints. Derived supplies
 *   template <class T> Vec<T, Eigen::Dynamic> residual(x, u) const
 * and gets exact first and second constraint derivatives by nested forward
 * mode differentiation.
 */
template <class Derived, int NX, int NU>
class ImplicitModel : public OcpModel {
 public:
  static constexpr int kNz = NX + NU;
  using Inner = Eigen::AutoDiffScalar<Vec<double, kNz>>;
  using Outer = Eigen::AutoDiffScalar<Vec<Inner, kNz>>;

  Dims dims() const override { return {N_, NX, NU, nc_}; }
  VectorXd initial_state() const override { return x_init_; }
  std::vector<bool> nonneg_mask() const override { return mask_; }

  double cost(int t, const VectorXd& x, const VectorXd& u) const override {
    const VectorXd& wx = t == N_ - 1 ? wx_terminal_ : wx_running_;
    const VectorXd dx = x - x_goal_;
    const VectorXd du = u - u_ref_;
    return 0.5 * (dx.cwiseProduct(wx).dot(dx) + du.cwiseProduct(wu_).dot(du));
  }

  ScalarDerivatives cost_derivatives(int t, const VectorXd& x,
                                     const VectorXd& u) const override {
    const VectorXd& wx = t == N_ - 1 ? wx_terminal_ : wx_running_;
    ScalarDerivatives out;
    out.value = cost(t, x, u);
    out.x = wx.cwiseProduct(x - x_goal_);
    out.u = wu_.cwiseProduct(u - u_ref_);
    out.xx = wx.asDiagonal();
    out.ux = MatrixXd::Zero(NU, NX);
    out.uu = wu_.asDiagonal();
    return out;
  }

  VectorXd dynamics(int, const VectorXd& x, const VectorXd& u) const override {
    return Fx_ * x + Fu_ * u;
  }

  VectorDerivatives dynamics_derivatives(int t, const VectorXd& x,
                                         const VectorXd& u) const override {
    return {dynamics(t, x, u), Fx_, Fu_, {}, {}, {}};
  }

  VectorXd constraints(int, const VectorXd& x,
                       const VectorXd& u) const override {
    require(x.size() == NX && u.size() == NU,
            "constraints: argument has wrong dimension");
    const Vec<double, NX> xf = x;
    const Vec<double, NU> uf = u;
    return self().template residual<double>(xf, uf);
  }

  VectorDerivatives constraint_derivatives(int, const VectorXd& x,
                                           const VectorXd& u) const override {
    require(x.size() == NX && u.size() == NU,
            "constraint_derivatives: argument has wrong dimension");
    Vec<Outer, NX> xa;
    Vec<Outer, NU> ua;
    for (int i = 0; i < kNz; ++i) {
      Outer& v = i < NX ? xa(i) : ua(i - NX);
      v.value() = Inner(i < NX ? x(i) : u(i - NX), kNz, i);
      for (int j = 0; j < kNz; ++j) {
        v.derivatives()(j) = Inner(i == j ? 1.0 : 0.0);
      }
    }
    const Vec<Outer, Eigen::Dynamic> r = self().template residual<Outer>(xa, ua);

    VectorDerivatives out;
    out.value.resize(nc_);
    out.x.resize(nc_, NX);
    out.u.resize(nc_, NU);
    for (int k = 0; k < nc_; ++k) {
      out.value(k) = r(k).value().value();
      Eigen::Matrix<double, kNz, kNz> H;
      for (int j = 0; j < kNz; ++j) {
        const double g = r(k).derivatives()(j).value();
        if (j < NX) {
          out.x(k, j) = g;
        } else {
          out.u(k, j - NX) = g;
        }
        H.row(j) = r(k).derivatives()(j).derivatives().transpose();
      }
      H = (0.5 * (H + H.transpose())).eval();
      out.xx.push_back(H.template topLeftCorner<NX, NX>());
      out.ux.push_back(H.template bottomLeftCorner<NU, NX>());
      out.uu.push_back(H.template bottomRightCorner<NU, NU>());
    }
    return out;
  }

  Trajectory initial_guess() const {
    Trajectory u(N_, u_guess_);
    if (interpolate_) {
      // Configurations move linearly from rest to the goal.
      for (int t = 0; t < N_; ++t) {
        const double s = static_cast<double>(t + 1) / N_;
        u[t].template segment<2>(1) =
            (1.0 - s) * x_init_.template tail<2>() + s * x_goal_.template tail<2>();
      }
    }
    return u;
  }

 protected:
  ImplicitModel(int N, int nc) : N_(N), nc_(nc) {
    require(N >= 1, "horizon must be at least one stage");
    x_init_ = VectorXd::Zero(NX);
    x_goal_ = VectorXd::Zero(NX);
    wx_running_ = VectorXd::Zero(NX);
    wx_terminal_ = VectorXd::Zero(NX);
    wu_ = VectorXd::Zero(NU);
    u_ref_ = VectorXd::Zero(NU);
    u_guess_ = VectorXd::Zero(NU);
    Fx_ = MatrixXd::Zero(NX, NX);
    Fu_ = MatrixXd::Zero(NX, NU);
  }

  const Derived& self() const { return static_cast<const Derived&>(*this); }

  int N_;
  int nc_;
  VectorXd x_init_, x_goal_;
  VectorXd wx_running_, wx_terminal_, wu_, u_ref_, u_guess_;
  MatrixXd Fx_, Fu_;
  std::vector<bool> mask_;
  bool interpolate_ = false;
};

class Pendulum : public ImplicitModel<Pendulum, 2, 3> {
 public:
  explicit Pendulum(const BenchmarkSpec& spec)
      : ImplicitModel(spec.N, 2),
        dt_(spec.dt),
        m_(spec.param("mass")),
        l_(spec.param("length")),
        g_(spec.param("gravity")),
        b_(spec.param("damping")),
        shift_(spec.param("torque_shift")) {
    require(dt_ > 0.0, "pendulum: dt must be positive");
    x_goal_ << spec.param("goal_angle"), 0.0;
    wx_terminal_.setConstant(spec.param("w_terminal"));
    wu_(0) = spec.param("w_torque");
    u_ref_(0) = shift_;
    u_guess_(0) = shift_;
    Fu_(0, 1) = 1.0;
    Fu_(1, 2) = 1.0;
    if (shift_ > 0.0) {
      mask_ = {true, false, false};
    }
  }

  template <class T>
  Vec<T, Eigen::Dynamic> residual(const Vec<T, 2>& x,
                                  const Vec<T, 3>& u) const {
    using std::sin;
    Vec<T, Eigen::Dynamic> r(2);
    r(0) = u(1) - x(0) - dt_ * u(2);
    r(1) = m_ * l_ * l_ * (u(2) - x(1)) -
           dt_ * ((u(0) - shift_) - m_ * g_ * l_ * sin(x(0)) - b_ * x(1));
    return r;
  }

 private:
  double dt_, m_, l_, g_, b_, shift_;
};

// Lagrangian mechanics of the two-degree-of-freedom systems.
struct CartpoleSystem {
  double mc, mp, l, g;
  static constexpr int kActuated = 0;

  template <class T>
  Mat2<T> mass(const Vec<T, 2>& q) const {
    using std::cos;
    Mat2<T> M;
    M(0, 0) = T(mc + mp);
    M(0, 1) = mp * l * cos(q(1));
    M(1, 0) = M(0, 1);
    M(1, 1) = T(mp * l * l);
    return M;
  }

  // dL/dq at (q, v).
  template <class T>
  Vec<T, 2> lagrangian_q(const Vec<T, 2>& q, const Vec<T, 2>& v) const {
    using std::sin;
    Vec<T, 2> out;
    out(0) = T(0.0);
    out(1) = -mp * l * sin(q(1)) * v(0) * v(1) - mp * g * l * sin(q(1));
    return out;
  }
};

struct AcrobotSystem {
  double m1, m2, l1, l2, g;
  static constexpr int kActuated = 1;

  double lc1() const { return 0.5 * l1; }
  double lc2() const { return 0.5 * l2; }
  double I1() const { return m1 * l1 * l1 / 3.0; }
  double I2() const { return m2 * l2 * l2 / 3.0; }

  template <class T>
  Mat2<T> mass(const Vec<T, 2>& q) const {
    using std::cos;
    const T c2 = cos(q(1));
    const double k = m2 * l1 * lc2();
    Mat2<T> M;
    M(0, 0) = I1() + I2() + m2 * l1 * l1 + 2.0 * k * c2;
    M(0, 1) = I2() + k * c2;
    M(1, 0) = M(0, 1);
    M(1, 1) = T(I2());
    return M;
  }

  template <class T>
  Vec<T, 2> lagrangian_q(const Vec<T, 2>& q, const Vec<T, 2>& v) const {
    using std::sin;
    const T s1 = sin(q(0));
    const T s2 = sin(q(1));
    const T s12 = sin(q(0) + q(1));
    const double k = m2 * l1 * lc2();
    Vec<T, 2> out;
    out(0) = -(m1 * g * lc1() * s1 + m2 * g * (l1 * s1 + lc2() * s12));
    out(1) = -k * s2 * (v(0) * v(0) + v(0) * v(1)) - m2 * g * lc2() * s12;
    return out;
  }
};

/// Discrete Euler-Lagrange residual with the midpoint rule,
/// D2 Ld(q0, q1) + D1 Ld(q1, q2), without external forcing.
template <class System, class T>
Vec<T, 2> del_residual(const System& sys, const Vec<T, 2>& q0,
                       const Vec<T, 2>& q1, const Vec<T, 2>& q2, double dt) {
  auto parts = [&](const Vec<T, 2>& a, const Vec<T, 2>& b, Vec<T, 2>& lq,
                   Vec<T, 2>& lv) {
    Vec<T, 2> qm, v;
    for (int i = 0; i < 2; ++i) {
      qm(i) = 0.5 * (a(i) + b(i));
      v(i) = (b(i) - a(i)) / dt;
    }
    lq = sys.lagrangian_q(qm, v);
    lv = sys.mass(qm) * v;
  };
  Vec<T, 2> lq0, lv0, lq1, lv1;
  parts(q0, q1, lq0, lv0);
  parts(q1, q2, lq1, lv1);
  Vec<T, 2> r;
  for (int i = 0; i < 2; ++i) {
    r(i) = 0.5 * dt * lq0(i) + lv0(i) + 0.5 * dt * lq1(i) - lv1(i);
  }
  return r;
}

/// x = (q_{t-1}, q_t); u starts with (actuation, q_{t+1}).
template <class Derived, class System, int NU>
class Variational : public ImplicitModel<Derived, 4, NU> {
  using Base = ImplicitModel<Derived, 4, NU>;

 public:
  Variational(const BenchmarkSpec& spec, System sys, int nc,
              const Vec<double, 2>& q_goal, double w_actuation)
      : Base(spec.N, nc), sys_(sys), dt_(spec.dt) {
    require(dt_ > 0.0, spec.name + ": dt must be positive");
    this->x_goal_ << q_goal, q_goal;
    this->wx_running_.setConstant(spec.param("w_state"));
    this->wx_terminal_.setConstant(spec.param("w_terminal"));
    this->wu_(0) = w_actuation;
    this->Fx_(0, 2) = 1.0;
    this->Fx_(1, 3) = 1.0;
    this->Fu_(2, 1) = 1.0;
    this->Fu_(3, 2) = 1.0;
    this->interpolate_ = spec.param("interpolate") != 0.0;
  }

 protected:
  template <class T>
  Vec<T, 2> manipulator_residual(const Vec<T, 4>& x,
                                 const Vec<T, NU>& u) const {
    const Vec<T, 2> q0 = x.template head<2>();
    const Vec<T, 2> q1 = x.template tail<2>();
    const Vec<T, 2> q2 = u.template segment<2>(1);
    Vec<T, 2> r = del_residual(sys_, q0, q1, q2, dt_);
    r(System::kActuated) += dt_ * u(0);
    return r;
  }

  System sys_;
  double dt_;
};

class Cartpole : public Variational<Cartpole, CartpoleSystem, 3> {
 public:
  explicit Cartpole(const BenchmarkSpec& spec)
      : Variational(spec, system(spec), 2, goal(),
                    spec.param("w_force")) {}

  template <class T>
  Vec<T, Eigen::Dynamic> residual(const Vec<T, 4>& x,
                                  const Vec<T, 3>& u) const {
    Vec<T, Eigen::Dynamic> r(2);
    r.template head<2>() = manipulator_residual<T>(x, u);
    return r;
  }

  static CartpoleSystem system(const BenchmarkSpec& s) {
    return {s.param("mass_cart"), s.param("mass_pole"), s.param("length"),
            s.param("gravity")};
  }
  static Vec<double, 2> goal() { return {0.0, std::numbers::pi}; }
};

class CartpoleFriction : public Variational<CartpoleFriction, CartpoleSystem, 15> {
 public:
  explicit CartpoleFriction(const BenchmarkSpec& spec)
      : Variational(spec, Cartpole::system(spec), 14, Cartpole::goal(),
                    spec.param("w_force")),
        kappa_(spec.param("kappa")) {
    const CartpoleSystem& s = sys_;
    limit_[0] = spec.param("mu_cart") * (s.mc + s.mp) * s.g;
    limit_[1] = spec.param("mu_pole") * s.mp * s.g * s.l;
    mask_.assign(15, true);
    mask_[0] = mask_[1] = mask_[2] = false;
    for (int j = 0; j < 2; ++j) {
      const int b = 3 + 6 * j;
      u_guess_.segment(b, 5).setConstant(0.1);
      u_guess_(b + 5) = std::max(limit_[j] - 0.2, 0.1);
    }
  }

  template <class T>
  Vec<T, Eigen::Dynamic> residual(const Vec<T, 4>& x,
                                  const Vec<T, 15>& u) const {
    Vec<T, Eigen::Dynamic> r(14);
    const Vec<T, 2> del = manipulator_residual<T>(x, u);
    for (int j = 0; j < 2; ++j) {
      const int b = 3 + 6 * j;
      const T& bp = u(b);
      const T& bm = u(b + 1);
      const T& psi = u(b + 2);
      const T& etap = u(b + 3);
      const T& etam = u(b + 4);
      const T& s = u(b + 5);
      const T v = (u(1 + j) - x(2 + j)) / dt_;
      r(j) = del(j) + dt_ * (bp - bm);
      r(2 + 3 * j) = etap - psi - v;
      r(3 + 3 * j) = etam - psi + v;
      r(4 + 3 * j) = s + bp + bm - limit_[j];
      r(8 + 3 * j) = bp * etap - kappa_;
      r(9 + 3 * j) = bm * etam - kappa_;
      r(10 + 3 * j) = psi * s - kappa_;
    }
    return r;
  }

 private:
  double kappa_;
  double limit_[2];
};

class Acrobot : public Variational<Acrobot, AcrobotSystem, 3> {
 public:
  explicit Acrobot(const BenchmarkSpec& spec)
      : Variational(spec, system(spec), 2, goal(), spec.param("w_torque")) {}

  template <class T>
  Vec<T, Eigen::Dynamic> residual(const Vec<T, 4>& x,
                                  const Vec<T, 3>& u) const {
    Vec<T, Eigen::Dynamic> r(2);
    r.template head<2>() = manipulator_residual<T>(x, u);
    return r;
  }

  static AcrobotSystem system(const BenchmarkSpec& s) {
    return {s.param("mass1"), s.param("mass2"), s.param("length1"),
            s.param("length2"), s.param("gravity")};
  }
  static Vec<double, 2> goal() { return {std::numbers::pi, 0.0}; }
};

class AcrobotContact : public Variational<AcrobotContact, AcrobotSystem, 7> {
 public:
  explicit AcrobotContact(const BenchmarkSpec& spec)
      : Variational(spec, Acrobot::system(spec), 6, Acrobot::goal(),
                    spec.param("w_torque")),
        limit_(spec.param("limit")),
        kappa_(spec.param("kappa")) {
    require(limit_ > 0.0, "acrobot_contact: limit must be positive");
    mask_ = {false, false, false, true, true, true, true};
    u_guess_(3) = u_guess_(4) = 1e-2;
    u_guess_(5) = u_guess_(6) = limit_;
  }

  template <class T>
  Vec<T, Eigen::Dynamic> residual(const Vec<T, 4>& x,
                                  const Vec<T, 7>& u) const {
    Vec<T, Eigen::Dynamic> r(6);
    const Vec<T, 2> del = manipulator_residual<T>(x, u);
    r(0) = del(0);
    r(1) = del(1) + u(4) - u(3);
    r(2) = u(5) - limit_ + u(2);
    r(3) = u(6) - limit_ - u(2);
    r(4) = u(3) * u(5) - kappa_;
    r(5) = u(4) * u(6) - kappa_;
    return r;
  }

 private:
  double limit_, kappa_;
};

}  // namespace

std::shared_ptr<const OcpModel> build_pendulum_invdyn(const BenchmarkSpec& spec) {
  return std::make_shared<const Pendulum>(spec);
}

std::shared_ptr<const OcpModel> build_cartpole_friction(
    const BenchmarkSpec& spec) {
  if (spec.param("friction") == 0.0 ||
      (spec.param("mu_cart") == 0.0 && spec.param("mu_pole") == 0.0)) {
    return std::make_shared<const Cartpole>(spec);
  }
  return std::make_shared<const CartpoleFriction>(spec);
}

std::shared_ptr<const OcpModel> build_acrobot_contact(
    const BenchmarkSpec& spec) {
  if (spec.param("contact") == 0.0) {
    return std::make_shared<const Acrobot>(spec);
  }
  return std::make_shared<const AcrobotContact>(spec);
}

namespace {

template <class Model>
Problem implicit_problem(const BenchmarkSpec& spec) {
  auto model = std::make_shared<const Model>(spec);
  Trajectory u = model->initial_guess();
  return {std::move(model), std::move(u)};
}

}  // namespace

Problem make_problem(const BenchmarkSpec& spec) {
  const std::string& n = spec.name;
  if (n == "eqlq") {
    auto model = build_eqlq(spec.seed, spec.N, static_cast<int>(spec.param("nx")),
                            static_cast<int>(spec.param("nu")),
                            static_cast<int>(spec.param("nc")));
    const Dims d = model->dims();
    return {model, Trajectory(d.N, VectorXd::Zero(d.nu))};
  }
  if (n == "pendulum" || n == "pendulum_bounded") {
    return implicit_problem<Pendulum>(spec);
  }
  if (n == "cartpole" || n == "cartpole_friction") {
    return spec.param("friction") == 0.0 ? implicit_problem<Cartpole>(spec)
                                         : implicit_problem<CartpoleFriction>(spec);
  }
  if (n == "acrobot" || n == "acrobot_contact") {
    return spec.param("contact") == 0.0 ? implicit_problem<Acrobot>(spec)
                                        : implicit_problem<AcrobotContact>(spec);
  }
  throw InputError("unknown problem '" + n + "'");
}

}  // namespace filterddp
