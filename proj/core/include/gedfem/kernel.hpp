#pragma once

#include "gedfem/fem.hpp"
#include "gedfem/return_map.hpp"

namespace gedfem {

// Element kernel: residual contributions of one HEX8 element, following the
// energy route. At each quadrature point the gradient of Psi_int with respect
// to (F, grad_phi, phi) is taken in one 13-seed dual pass; those conjugates
// (P, Y, -Y_scalar) are scattered with the shape-function gradients. With
// S = Dual<double,32> the same pass carries the consistent element tangent.
//
// Scheme selects the history treatment:
//   monolithic - return map from the committed kappa at the current trial
//                fields; its linearization enters through the implicit
//                derivative dkappa/dx = -(dPhi/dx)/(dPhi/dkappa)
//   staggered  - kappa frozen at kappa_in (last sweep value)
//   local_only - staggered with the non-local terms disabled

struct KernelControls {
  Scheme scheme = Scheme::monolithic;
  ReturnMapControls local{};
  double kappa_d_scale = 1.0;  // per-element imperfection factor hook
};

template <typename S>
struct KernelResult {
  std::array<S, kElemDofs> r{};              // [u(24); phi(8)]
  std::array<double, kQuadPerElem> kappa{};  // kappa used at each quadrature point
};

namespace detail {

struct QuadGeometry {
  std::array<std::array<double, 3>, kNodesPerElem> dndx;
  std::array<double, kNodesPerElem> n;
  Vec3d x_ref;
  double weight;  // J_q w_q
};

// Reference geometry at one quadrature point; throws on non-positive Jacobian.
QuadGeometry quad_geometry(const std::array<std::array<double, 3>, kNodesPerElem>& coords,
                           int q);

}  // namespace detail

template <typename S>
KernelResult<S> element_kernel(const std::array<std::array<double, 3>, kNodesPerElem>& coords,
                               const std::array<S, 24>& u_e, const std::array<S, 8>& phi_e,
                               const std::array<double, kQuadPerElem>& kappa_in,
                               const MaterialModel& material, Coupling coupling,
                               const KernelControls& ctl,
                               const std::function<double(const Vec3d&)>* kappa_d_field = nullptr) {
  using ID = Dual<S, 9>;
  KernelResult<S> out;
  for (auto& v : out.r) v = S(0.0);

  for (int q = 0; q < kQuadPerElem; ++q) {
    const detail::QuadGeometry g = detail::quad_geometry(coords, q);

    // F = I + sum_a u_a (x) dN_a/dX ; phi and its gradient likewise
    Tensor2<S> f_s = Tensor2<S>::identity();
    for (int a = 0; a < kNodesPerElem; ++a)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) f_s(i, j) += u_e[3 * a + i] * g.dndx[a][j];
    S phi_s(0.0);
    Vec3<S> gphi_s;
    for (int a = 0; a < kNodesPerElem; ++a) {
      phi_s += phi_e[a] * g.n[a];
      for (int j = 0; j < 3; ++j) gphi_s[j] += phi_e[a] * g.dndx[a][j];
    }

    Tensor2d f_val;
    for (int i = 0; i < 9; ++i) f_val.e[i] = value_of(f_s.e[i]);
    if (!(determinant(f_val) > 0.0)) throw ConstitutiveError("element kernel: det F <= 0");

    const MaterialModel* mat = &material;
    MaterialModel scaled;
    double kd_scale = ctl.kappa_d_scale;
    if (kappa_d_field) kd_scale *= (*kappa_d_field)(g.x_ref);
    if (kd_scale != 1.0) {
      if (material.is_closed_form()) {
        ClosedFormParams p = material.closed_form();
        p.kappa_d *= kd_scale;
        scaled = MaterialModel(p);
      } else {
        DataDrivenParams p = material.data_driven();
        p.kappa_d *= kd_scale;
        scaled = MaterialModel(std::move(p));
      }
      mat = &scaled;
    }

    // History treatment
    S kappa_s;
    if (ctl.scheme == Scheme::monolithic) {
      const double phi_val = value_of(phi_s);
      Vec3d gphi_val(value_of(gphi_s[0]), value_of(gphi_s[1]), value_of(gphi_s[2]));
      const ReturnMapResult rm =
          return_map(f_val, phi_val, gphi_val, kappa_in[q], *mat, coupling, ctl.local);
      if (!rm.converged)
        throw ConstitutiveError("element kernel: local update failed (status " +
                                std::to_string(static_cast<int>(rm.status)) + ")");
      out.kappa[q] = rm.kappa_next;
      kappa_s = S(rm.kappa_next);
      if constexpr (!std::is_same_v<S, double>) {
        if (rm.status == ReturnMapStatus::converged) {
          // Implicit function theorem on Phi_d(x, kappa(x)) = 0.
          const double dphi_dk =
              yield_kappa_derivative(f_val, phi_val, gphi_val, rm.kappa_next, *mat, coupling);
          if (std::abs(dphi_dk) > 1e-12) {
            const S phi_of_x =
                yield_function(f_s, phi_s, gphi_s, S(rm.kappa_next), *mat, coupling);
            for (std::size_t t = 0; t < kappa_s.tang.size(); ++t)
              kappa_s.tang[t] = -phi_of_x.tang[t] / dphi_dk;
          }
        }
      }
    } else {
      out.kappa[q] = kappa_in[q];
      kappa_s = S(kappa_in[q]);
    }

    // One inner dual pass seeded on F differentiates the degraded elastic
    // energy; the non-local contributions have closed forms and are written
    // directly in outer arithmetic (their kappa_s dependence keeps the exact
    // dof linearization):
    //   Y      = c_d C^{-1} grad phi          w := C^{-1} grad phi
    //   Y_scl  = -beta_d (phi - kappa)
    //   P_grad = -c_d F (w (x) w)
    Tensor2<ID> f_in;
    for (int i = 0; i < 9; ++i) f_in.e[i] = ID::seeded(f_s.e[i], i);
    const Tensor2<ID> c_in = right_cauchy_green(f_in);
    const ID det_in = determinant(c_in);
    const S fd_s = degradation_factor(kappa_s, mat->eta_d(), mat->kappa_d());
    const ID psi_el = ID(fd_s) * detail::elastic_energy_det(c_in, det_in, *mat);
    if (!isfinite_scalar(psi_el)) throw ConstitutiveError("element kernel: non-finite energy");

    std::array<S, 9> p_q;
    for (int i = 0; i < 9; ++i) p_q[i] = psi_el.tang[i];

    Vec3<S> y_vec;
    S dpsi_dphi(0.0);
    if (coupling == Coupling::nonlocal) {
      if (mat->c_d() != 0.0) {
        const Tensor2<S> c_s = right_cauchy_green(f_s);
        const Tensor2<S> cof_s = cofactor(c_s);
        const S det_s = determinant(c_s);
        Vec3<S> w;
        for (int i = 0; i < 3; ++i) {
          S acc = cof_s(0, i) * gphi_s[0];
          acc += cof_s(1, i) * gphi_s[1];
          acc += cof_s(2, i) * gphi_s[2];
          w[i] = acc / det_s;
        }
        for (int i = 0; i < 3; ++i) y_vec[i] = mat->c_d() * w[i];
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            S acc = f_s(i, 0) * w[0];
            acc += f_s(i, 1) * w[1];
            acc += f_s(i, 2) * w[2];
            p_q[3 * i + j] -= mat->c_d() * acc * w[j];
          }
      }
      dpsi_dphi = mat->beta_d() * (phi_s - kappa_s);
    }

    for (int a = 0; a < kNodesPerElem; ++a) {
      for (int i = 0; i < 3; ++i) {
        S acc = p_q[3 * i + 0] * g.dndx[a][0];
        acc += p_q[3 * i + 1] * g.dndx[a][1];
        acc += p_q[3 * i + 2] * g.dndx[a][2];
        out.r[3 * a + i] += acc * g.weight;
      }
      S acc_phi = dpsi_dphi * g.n[a];
      for (int k = 0; k < 3; ++k) acc_phi += y_vec[k] * g.dndx[a][k];
      out.r[24 + a] += acc_phi * g.weight;
    }
  }
  return out;
}

// Public fixed-signature wrapper: residual plus consistent 32x32 tangent.
struct ElementSystem {
  std::array<double, 24> r_u{};
  std::array<double, 8> r_phi{};
  std::array<std::array<double, kElemDofs>, kElemDofs> k{};
  std::array<double, kQuadPerElem> kappa{};
};

ElementSystem element_system(const std::array<std::array<double, 3>, kNodesPerElem>& coords,
                             const std::array<double, 24>& u_e, const std::array<double, 8>& phi_e,
                             const std::array<double, kQuadPerElem>& kappa_in,
                             const MaterialModel& material, Coupling coupling,
                             const KernelControls& ctl,
                             const std::function<double(const Vec3d&)>* kappa_d_field = nullptr);

}  // namespace gedfem
