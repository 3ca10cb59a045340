#include "fnls/krylov.hpp"

#include <cmath>

#include "fnls/errors.hpp"

namespace fnls {

namespace {

using Vec = std::vector<Complex>;

// sum x_k y_k
Complex bilinear(std::span<const Complex> x, std::span<const Complex> y) {
  Complex s{};
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s;
}

// sum conj(x_k) y_k
Complex inner(std::span<const Complex> x, std::span<const Complex> y) {
  Complex s{};
  for (std::size_t k = 0; k < x.size(); ++k) s += std::conj(x[k]) * y[k];
  return s;
}

double norm2(std::span<const Complex> x) {
  double s = 0.0;
  for (const auto& z : x) s += std::norm(z);
  return std::sqrt(s);
}

void apply_precond(const LinearMap& m, std::span<const Complex> in, std::span<Complex> out) {
  if (m) {
    m(in, out);
  } else {
    std::copy(in.begin(), in.end(), out.begin());
  }
}

bool tiny(Complex z) { return std::abs(z) < kBreakdownThreshold; }

// Shared setup: sizes, x <- x0, r <- b - A x0. Returns ||b||; a zero right-hand side
// short-circuits to x = 0.
struct Start {
  Vec x;
  Vec r;
  double bnorm = 0.0;
  bool trivial = false;
};

Start start(const LinearMap& a, std::span<const Complex> b, std::span<const Complex> x0, const SolverConfig& cfg,
            const char* name) {
  cfg.validate();
  detail::require_size(x0.size(), b.size(), name);
  Start s;
  s.bnorm = norm2(b);
  if (s.bnorm == 0.0) {
    s.x.assign(b.size(), Complex{});
    s.trivial = true;
    return s;
  }
  s.x.assign(x0.begin(), x0.end());
  s.r.resize(b.size());
  a(s.x, s.r);
  for (std::size_t k = 0; k < b.size(); ++k) s.r[k] = b[k] - s.r[k];
  return s;
}

SolveResult trivial_result(Start&& s) {
  SolveResult out;
  out.x = std::move(s.x);
  out.report.converged = true;
  out.report.residual_history = {0.0};
  return out;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(rel_tol > 0.0)) throw DomainError("SolverConfig: rel_tol must be positive");
  if (max_iters < 1) throw DomainError("SolverConfig: max_iters must be >= 1");
}

SolveResult cocg(const LinearMap& a, std::span<const Complex> b, std::span<const Complex> x0,
                 const LinearMap& precond, const SolverConfig& cfg, const IterationObserver& observer) {
  Start s = start(a, b, x0, cfg, "cocg");
  if (s.trivial) return trivial_result(std::move(s));
  const std::size_t n = b.size();
  Vec& x = s.x;
  Vec& r = s.r;
  Vec z(n), p(n, Complex{}), ap(n);

  SolverReport rep;
  double rel = norm2(r) / s.bnorm;
  rep.residual_history.push_back(rel);

  apply_precond(precond, r, z);
  Complex rz = bilinear(r, z);
  Complex beta{};
  while (rel > cfg.rel_tol && rep.iterations < cfg.max_iters) {
    if (tiny(rz)) throw BreakdownError("cocg: <r, M^-1 r> vanished", rep);
    for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
    a(p, ap);
    ++rep.matvec_count;
    const Complex pap = bilinear(p, ap);
    if (tiny(pap)) throw BreakdownError("cocg: <p, A p> vanished", rep);
    const Complex alpha = rz / pap;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * ap[k];
    }
    ++rep.iterations;
    rel = norm2(r) / s.bnorm;
    rep.residual_history.push_back(rel);
    if (observer) observer(rep.iterations, x);
    if (rel <= cfg.rel_tol) break;
    apply_precond(precond, r, z);
    const Complex rz_next = bilinear(r, z);
    beta = rz_next / rz;
    rz = rz_next;
  }
  rep.converged = rel <= cfg.rel_tol;
  return {std::move(x), std::move(rep)};
}

// Preconditioned COCR. With z_n = M^{-1} r_n and u_n = A z_n:
//   alpha = <z_n, u_n> / <q_n, M^{-1} q_n>,  q_n = A p_n kept by recurrence,
//   x += alpha p, r -= alpha q, z -= alpha M^{-1} q,
//   beta = <z_{n+1}, u_{n+1}> / <z_n, u_n>,  p = z + beta p,  q = u + beta q.
// For M = I this is the residual-minimizing variant in the A-conjugate bilinear form.
// The product A z_{n+1} is skipped once the residual test passes, so the count of products
// equals the count of iterations.
SolveResult cocr(const LinearMap& a, std::span<const Complex> b, std::span<const Complex> x0,
                 const LinearMap& precond, const SolverConfig& cfg, const IterationObserver& observer) {
  Start s = start(a, b, x0, cfg, "cocr");
  if (s.trivial) return trivial_result(std::move(s));
  const std::size_t n = b.size();
  Vec& x = s.x;
  Vec& r = s.r;
  Vec z(n), u(n), p(n), q(n), mq(n);

  SolverReport rep;
  double rel = norm2(r) / s.bnorm;
  rep.residual_history.push_back(rel);
  if (rel <= cfg.rel_tol) {
    rep.converged = true;
    return {std::move(x), std::move(rep)};
  }

  apply_precond(precond, r, z);
  a(z, u);
  ++rep.matvec_count;
  p = z;
  q = u;
  Complex zu = bilinear(z, u);
  while (true) {
    if (tiny(zu)) throw BreakdownError("cocr: <z, A z> vanished", rep);
    apply_precond(precond, q, mq);
    const Complex qmq = bilinear(q, mq);
    if (tiny(qmq)) throw BreakdownError("cocr: <A p, M^-1 A p> vanished", rep);
    const Complex alpha = zu / qmq;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * q[k];
      z[k] -= alpha * mq[k];
    }
    ++rep.iterations;
    rel = norm2(r) / s.bnorm;
    rep.residual_history.push_back(rel);
    if (observer) observer(rep.iterations, x);
    if (rel <= cfg.rel_tol || rep.iterations >= cfg.max_iters) break;
    a(z, u);
    ++rep.matvec_count;
    const Complex zu_next = bilinear(z, u);
    const Complex beta = zu_next / zu;
    zu = zu_next;
    for (std::size_t k = 0; k < n; ++k) {
      p[k] = z[k] + beta * p[k];
      q[k] = u[k] + beta * q[k];
    }
  }
  rep.converged = rel <= cfg.rel_tol;
  return {std::move(x), std::move(rep)};
}

SolveResult bicgstab(const LinearMap& a, std::span<const Complex> b, std::span<const Complex> x0,
                     const LinearMap& precond, const SolverConfig& cfg, const IterationObserver& observer) {
  Start s = start(a, b, x0, cfg, "bicgstab");
  if (s.trivial) return trivial_result(std::move(s));
  const std::size_t n = b.size();
  Vec& x = s.x;
  Vec& r = s.r;
  const Vec shadow = r;
  Vec p(n), v(n, Complex{}), phat(n), sv(n), shat(n), t(n);

  SolverReport rep;
  double rel = norm2(r) / s.bnorm;
  rep.residual_history.push_back(rel);

  Complex rho_prev{}, alpha{}, omega{};
  while (rel > cfg.rel_tol && rep.iterations < cfg.max_iters) {
    const Complex rho = inner(shadow, r);
    if (tiny(rho)) throw BreakdownError("bicgstab: (r~, r) vanished", rep);
    if (rep.iterations == 0) {
      p = r;
    } else {
      const Complex beta = (rho * alpha) / (rho_prev * omega);
      for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + beta * (p[k] - omega * v[k]);
    }
    apply_precond(precond, p, phat);
    a(phat, v);
    const Complex rv = inner(shadow, v);
    if (tiny(rv)) throw BreakdownError("bicgstab: (r~, v) vanished", rep);
    alpha = rho / rv;
    for (std::size_t k = 0; k < n; ++k) sv[k] = r[k] - alpha * v[k];
    apply_precond(precond, sv, shat);
    a(shat, t);
    rep.matvec_count += 2;
    ++rep.iterations;

    if (norm2(sv) / s.bnorm <= cfg.rel_tol) {
      // Half-step convergence: s is already small enough, and omega = (t, s)/(t, t) may be 0/0.
      for (std::size_t k = 0; k < n; ++k) x[k] += alpha * phat[k];
      r = sv;
    } else {
      const Complex tt = inner(t, t);
      if (tiny(tt)) throw BreakdownError("bicgstab: (t, t) vanished", rep);
      omega = inner(t, sv) / tt;
      for (std::size_t k = 0; k < n; ++k) {
        x[k] += alpha * phat[k] + omega * shat[k];
        r[k] = sv[k] - omega * t[k];
      }
    }
    rho_prev = rho;
    rel = norm2(r) / s.bnorm;
    rep.residual_history.push_back(rel);
    if (observer) observer(rep.iterations, x);
  }
  rep.converged = rel <= cfg.rel_tol;
  return {std::move(x), std::move(rep)};
}

SolveResult krylov_solve(const LinearMap& a, std::span<const Complex> b, std::span<const Complex> x0,
                         const LinearMap& precond, const SolverConfig& cfg, const IterationObserver& observer) {
  const LinearMap none;
  const LinearMap& m = cfg.preconditioned ? precond : none;
  switch (cfg.method) {
    case KrylovMethod::Cocg:
      return cocg(a, b, x0, m, cfg, observer);
    case KrylovMethod::Cocr:
      return cocr(a, b, x0, m, cfg, observer);
    case KrylovMethod::BiCgStab:
      return bicgstab(a, b, x0, m, cfg, observer);
  }
  throw DomainError("krylov_solve: unknown method");
}

const char* to_string(KrylovMethod method) {
  switch (method) {
    case KrylovMethod::Cocg:
      return "cocg";
    case KrylovMethod::Cocr:
      return "cocr";
    case KrylovMethod::BiCgStab:
      return "bicgstab";
  }
  return "unknown";
}

KrylovMethod parse_krylov_method(const std::string& name) {
  if (name == "cocg") return KrylovMethod::Cocg;
  if (name == "cocr") return KrylovMethod::Cocr;
  if (name == "bicgstab") return KrylovMethod::BiCgStab;
  throw DomainError("unknown Krylov method '" + name + "'");
}

}  // namespace fnls
