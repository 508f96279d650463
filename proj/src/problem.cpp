#include "vem/problem.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "vem/fd.hpp"

namespace vem {

void fill_structural_defaults(OcpProblem& p) {
  const int n = p.n, m = p.m, q = p.q, r = p.r;
  if (!p.L) {
    p.L = [](const Vec&, const Vec&, double) { return 0.0; };
    if (!p.L_x) p.L_x = [n](const Vec&, const Vec&, double) { return Vec::Zero(n); };
    if (!p.L_u) p.L_u = [m](const Vec&, const Vec&, double) { return Vec::Zero(m); };
  }
  if (!p.phi) {
    p.phi = [](const Vec&, double) { return 0.0; };
    if (!p.phi_x) p.phi_x = [n](const Vec&, double) { return Vec::Zero(n); };
    if (!p.phi_t) p.phi_t = [](const Vec&, double) { return 0.0; };
    if (!p.phi_xx) p.phi_xx = [n](const Vec&, double) { return Mat::Zero(n, n); };
    if (!p.phi_tx) p.phi_tx = [n](const Vec&, double) { return Vec::Zero(n); };
  }
  if (q == 0) {
    p.g = [](const Vec&, double) { return Vec(); };
    p.g_xf = [n](const Vec&, double) { return Mat(0, n); };
    p.g_tf = [](const Vec&, double) { return Vec(); };
  }
  if (r == 0) {
    p.C = [](const Vec&, const Vec&, double) { return Vec(); };
    p.C_x = [n](const Vec&, const Vec&, double) { return Mat(0, n); };
    p.C_u = [m](const Vec&, const Vec&, double) { return Mat(0, m); };
    p.constraint_kinds.clear();
  }
}

void apply_fd_fallback(OcpProblem& p) {
  fill_structural_defaults(p);
  if (p.f && !p.f_x) {
    auto f = p.f;
    p.f_x = [f](const Vec& x, const Vec& u, double t) {
      return fd::jacobian([&](const Vec& xx) { return f(xx, u, t); }, x);
    };
  }
  if (p.f && !p.f_u) {
    auto f = p.f;
    p.f_u = [f](const Vec& x, const Vec& u, double t) {
      return fd::jacobian([&](const Vec& uu) { return f(x, uu, t); }, u);
    };
  }
  if (p.L && !p.L_x) {
    auto L = p.L;
    p.L_x = [L](const Vec& x, const Vec& u, double t) {
      return fd::gradient([&](const Vec& xx) { return L(xx, u, t); }, x);
    };
  }
  if (p.L && !p.L_u) {
    auto L = p.L;
    p.L_u = [L](const Vec& x, const Vec& u, double t) {
      return fd::gradient([&](const Vec& uu) { return L(x, uu, t); }, u);
    };
  }
  if (p.phi && !p.phi_x) {
    auto phi = p.phi;
    p.phi_x = [phi](const Vec& xf, double tf) {
      return fd::gradient([&](const Vec& xx) { return phi(xx, tf); }, xf);
    };
  }
  if (p.phi && !p.phi_t) {
    auto phi = p.phi;
    p.phi_t = [phi](const Vec& xf, double tf) {
      return fd::derivative([&](double tt) { return phi(xf, tt); }, tf);
    };
  }
  if (p.phi && !p.phi_xx) {
    auto phi_x = p.phi_x;
    p.phi_xx = [phi_x](const Vec& xf, double tf) {
      return fd::jacobian([&](const Vec& xx) { return phi_x(xx, tf); }, xf);
    };
  }
  if (p.phi && !p.phi_tx) {
    auto phi_x = p.phi_x;
    p.phi_tx = [phi_x](const Vec& xf, double tf) {
      return fd::vector_derivative([&](double tt) { return phi_x(xf, tt); }, tf);
    };
  }
  if (p.q > 0 && p.g && !p.g_xf) {
    auto g = p.g;
    p.g_xf = [g](const Vec& xf, double tf) {
      return fd::jacobian([&](const Vec& xx) { return g(xx, tf); }, xf);
    };
  }
  if (p.q > 0 && p.g && !p.g_tf) {
    auto g = p.g;
    p.g_tf = [g](const Vec& xf, double tf) {
      return fd::vector_derivative([&](double tt) { return g(xf, tt); }, tf);
    };
  }
  if (p.r > 0 && p.C && !p.C_x) {
    auto C = p.C;
    p.C_x = [C](const Vec& x, const Vec& u, double t) {
      return fd::jacobian([&](const Vec& xx) { return C(xx, u, t); }, x);
    };
  }
  if (p.r > 0 && p.C && !p.C_u) {
    auto C = p.C;
    p.C_u = [C](const Vec& x, const Vec& u, double t) {
      return fd::jacobian([&](const Vec& uu) { return C(x, uu, t); }, u);
    };
  }
}

namespace {

template <typename F>
void check_dims(std::vector<std::string>& issues, const char* name, F&& eval, int rows,
                int cols) {
  try {
    Mat v = eval();
    if (v.rows() != rows || v.cols() != cols) {
      std::ostringstream os;
      os << name << " returned " << v.rows() << "x" << v.cols() << ", expected " << rows << "x"
         << cols;
      issues.push_back(os.str());
    }
  } catch (const std::exception& e) {
    issues.push_back(std::string(name) + " threw: " + e.what());
  }
}

}  // namespace

std::vector<std::string> validate_problem(const OcpProblem& p, const SampleBox& box,
                                          unsigned seed) {
  std::vector<std::string> issues;
  auto require = [&](bool ok, const char* msg) {
    if (!ok) issues.push_back(msg);
  };
  require(p.n >= 1, "state dimension n must be >= 1");
  require(p.m >= 1, "control dimension m must be >= 1");
  require(p.q >= 0 && p.r >= 0, "constraint dimensions must be nonnegative");
  require(static_cast<bool>(p.f), "dynamics callback f is missing");
  require(static_cast<bool>(p.f_x), "Jacobian f_x is missing (supply it or apply_fd_fallback)");
  require(static_cast<bool>(p.f_u), "Jacobian f_u is missing (supply it or apply_fd_fallback)");
  require(p.x0.size() == p.n, "x0 has the wrong dimension");
  if (p.r > 0) {
    require(static_cast<int>(p.constraint_kinds.size()) == p.r,
            "constraint_kinds must have one entry per path constraint");
    require(static_cast<bool>(p.C) && static_cast<bool>(p.C_x) && static_cast<bool>(p.C_u),
            "path constraint callbacks C, C_x, C_u are required when r > 0");
  }
  if (p.q > 0) {
    require(static_cast<bool>(p.g) && static_cast<bool>(p.g_xf) && static_cast<bool>(p.g_tf),
            "terminal constraint callbacks g, g_xf, g_tf are required when q > 0");
  }
  if (!issues.empty()) return issues;

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto sample = [&](const Vec& lo, const Vec& hi) {
    Vec v(lo.size());
    for (int i = 0; i < lo.size(); ++i) v[i] = lo[i] + unit(rng) * (hi[i] - lo[i]);
    return v;
  };

  for (int pt = 0; pt < 10; ++pt) {
    const Vec x = sample(box.x_lo, box.x_hi);
    const Vec u = sample(box.u_lo, box.u_hi);
    const double t = box.t_lo + unit(rng) * (box.t_hi - box.t_lo);

    check_dims(issues, "f", [&] { return Mat(p.f(x, u, t)); }, p.n, 1);
    check_dims(issues, "f_x", [&] { return p.f_x(x, u, t); }, p.n, p.n);
    check_dims(issues, "f_u", [&] { return p.f_u(x, u, t); }, p.n, p.m);
    if (p.L_x) check_dims(issues, "L_x", [&] { return Mat(p.L_x(x, u, t)); }, p.n, 1);
    if (p.L_u) check_dims(issues, "L_u", [&] { return Mat(p.L_u(x, u, t)); }, p.m, 1);
    if (p.phi_x) check_dims(issues, "phi_x", [&] { return Mat(p.phi_x(x, t)); }, p.n, 1);
    if (p.phi_xx) check_dims(issues, "phi_xx", [&] { return p.phi_xx(x, t); }, p.n, p.n);
    if (p.phi_tx) check_dims(issues, "phi_tx", [&] { return Mat(p.phi_tx(x, t)); }, p.n, 1);
    if (p.q > 0) {
      check_dims(issues, "g", [&] { return Mat(p.g(x, t)); }, p.q, 1);
      check_dims(issues, "g_xf", [&] { return p.g_xf(x, t); }, p.q, p.n);
      check_dims(issues, "g_tf", [&] { return Mat(p.g_tf(x, t)); }, p.q, 1);
    }
    if (p.r > 0) {
      check_dims(issues, "C", [&] { return Mat(p.C(x, u, t)); }, p.r, 1);
      check_dims(issues, "C_x", [&] { return p.C_x(x, u, t); }, p.r, p.n);
      check_dims(issues, "C_u", [&] { return p.C_u(x, u, t); }, p.r, p.m);

      const Mat cx = p.C_x(x, u, t);
      const Mat cu = p.C_u(x, u, t);
      for (int i = 0; i < p.r && i < static_cast<int>(p.constraint_kinds.size()); ++i) {
        if (p.constraint_kinds[i] == ConstraintKind::pure_state &&
            cu.row(i).cwiseAbs().maxCoeff() > 1e-12) {
          std::ostringstream os;
          os << "constraint " << i << " tagged pure_state but C_u row is nonzero at a sample";
          issues.push_back(os.str());
        }
        if (p.constraint_kinds[i] == ConstraintKind::pure_control &&
            cx.row(i).cwiseAbs().maxCoeff() > 1e-12) {
          std::ostringstream os;
          os << "constraint " << i << " tagged pure_control but C_x row is nonzero at a sample";
          issues.push_back(os.str());
        }
      }
    }
    if (!issues.empty()) break;  // one bad point is enough for the report
  }
  return issues;
}

}  // namespace vem
