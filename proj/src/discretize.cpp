#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "local_kernels.hpp"
#include "mpsaw/discretize.hpp"
#include "mpsaw/errors.hpp"

namespace mpsaw {

std::string to_string(Method m) {
  switch (m) {
    case Method::MpsaW: return "mpsa-w";
    case Method::MpsaOSimplex: return "mpsa-o-simplex";
    case Method::MpfaScalar: return "mpfa-scalar";
  }
  return "?";
}

std::string to_string(Averaging a) {
  return a == Averaging::Vertex ? "vertex" : "edge";
}

double CoercivityReport::min_theta() const {
  double mn = std::numeric_limits<double>::infinity();
  for (const auto& e : entries)
    if (!e.skipped && !e.degenerate) mn = std::min(mn, e.theta);
  return mn;
}

double CoercivityReport::percentile_theta(double p) const {
  std::vector<double> v;
  for (const auto& e : entries)
    if (!e.skipped && !e.degenerate) v.push_back(e.theta);
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double idx = p * double(v.size() - 1);
  const std::size_t lo = std::size_t(idx);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (idx - double(lo)) * (v[hi] - v[lo]);
}

int CoercivityReport::flagged() const {
  int n = 0;
  for (const auto& e : entries)
    if (!e.skipped && (e.degenerate || e.theta <= theta_flag)) ++n;
  return n;
}

namespace {

// Internal consistency guard; the advertised 1e-12 bounds on these
// identities are asserted by the test suite, this only catches breakage.
constexpr double kGuard = 1e-9;

Eigen::Matrix3d embed(const Eigen::MatrixXd& M, int row, int col, int D) {
  Eigen::Matrix3d B = Eigen::Matrix3d::Zero();
  B.topLeftCorner(D, D) = M.block(row, col, D, D);
  return B;
}

struct Accum {
  long interior_regions = 0, boundary_regions = 0;
  long disp_min = std::numeric_limits<long>::max(), disp_max = 0;
  long disp_sum = 0;
  long max_rows = 0;
  double min_rcond = 1.0;

  void merge(const Accum& o) {
    interior_regions += o.interior_regions;
    boundary_regions += o.boundary_regions;
    disp_min = std::min(disp_min, o.disp_min);
    disp_max = std::max(disp_max, o.disp_max);
    disp_sum += o.disp_sum;
    max_rows = std::max(max_rows, o.max_rows);
    min_rcond = std::min(min_rcond, o.min_rcond);
  }
};

}  // namespace

namespace detail {
CoercivityEntry coercivity_impl(const RegionKernel& kern, const LocalSolve& ls,
                                const DiscOptions& opt);
}

Discretization discretize_all(const Mesh& m, const SubGeometry& sg,
                              const IsotropicField& mat,
                              const BoundaryConditions& bc,
                              const DiscOptions& opt) {
  if (opt.audit && opt.method == Method::MpfaScalar)
    throw ConfigError("coercivity audit is not defined for mpfa-scalar");
  const std::vector<InteractionRegion> regions = build_regions(m, sg, bc);

  Discretization disc;
  disc.dim = m.dim;
  disc.options = opt;
  disc.slots.base.assign(m.faces.size(), -1);
  disc.slots.face_type = bc.type;
  for (std::size_t f = 0; f < m.faces.size(); ++f)
    if (m.boundary(int(f))) {
      disc.slots.base[f] = disc.slots.count;
      disc.slots.count += int(m.faces[f].verts.size());
    }
  disc.stencils.resize(m.faces.size());
  for (std::size_t f = 0; f < m.faces.size(); ++f)
    disc.stencils[f].resize(m.faces[f].verts.size());
  if (opt.audit) {
    disc.audit.entries.resize(m.verts.size());
    disc.audit.theta_flag = opt.theta_flag;
  }

  const int D = m.dim;
  const bool scalar = opt.method == Method::MpfaScalar;

  auto process = [&](std::size_t s, Accum& acc) {
    const InteractionRegion& r = regions[s];
    const detail::RegionKernel kern(r, m, mat, opt);
    const LocalSystem sys = kern.assemble();
    const LocalSolve ls = solve_local(sys, int(s));
    acc.min_rcond = std::min(acc.min_rcond, ls.rcond);
    acc.max_rows = std::max(acc.max_rows, long(sys.A.rows()));
    if (r.n_boundary == 0) {
      acc.interior_regions += 1;
      const long rows = r.n_displacement_rows(D);
      acc.disp_min = std::min(acc.disp_min, rows);
      acc.disp_max = std::max(acc.disp_max, rows);
      acc.disp_sum += rows;
    } else {
      acc.boundary_regions += 1;
    }

    for (std::size_t si = 0; si < r.subfaces.size(); ++si) {
      const RegionSubface& sf = r.subfaces[si];
      const Eigen::MatrixXd M0 = kern.traction_coeffs(sf, 0) * ls.G;
      if (sf.lc1 >= 0) {
        const Eigen::MatrixXd M1 = kern.traction_coeffs(sf, 1) * ls.G;
        const double scale = std::max({M0.norm(), M1.norm(), 1e-300});
        if ((M0 + M1).norm() > kGuard * scale)
          throw NumericalError("sub-face traction balance broken at vertex " +
                               std::to_string(s) + ", face " +
                               std::to_string(sf.face));
      }

      SubfaceStencil st;
      st.cells = r.cells;
      st.cell_blocks.resize(r.cells.size());
      for (std::size_t lc = 0; lc < r.cells.size(); ++lc)
        st.cell_blocks[lc] =
            scalar ? Eigen::Matrix3d((M0(0, long(lc)) *
                                      Eigen::Matrix3d::Identity()).eval())
                   : embed(M0, 0, int(lc) * D, D);
      if (scalar)
        for (std::size_t lc = 0; lc < r.cells.size(); ++lc)
          for (int d = D; d < 3; ++d) st.cell_blocks[lc](d, d) = 0.0;
      Eigen::Matrix3d tsum = Eigen::Matrix3d::Zero();
      for (const auto& b : st.cell_blocks) tsum += b;
      double bscale = 1e-300;
      for (const auto& b : st.cell_blocks) bscale = std::max(bscale, b.norm());
      for (std::size_t sj = 0; sj < r.subfaces.size(); ++sj) {
        const int ord = sys.slot_of_subface[sj];
        if (ord < 0) continue;
        const RegionSubface& bf = r.subfaces[sj];
        Eigen::Matrix3d blk;
        if (scalar) {
          blk = M0(0, sys.boundary_offset + ord) * Eigen::Matrix3d::Identity();
          for (int d = D; d < 3; ++d) blk(d, d) = 0.0;
        } else {
          blk = embed(M0, 0, sys.boundary_offset + ord * D, D);
        }
        if (blk.norm() == 0.0) continue;
        st.slots.push_back(disc.slots.base[bf.face] + bf.corner);
        st.slot_blocks.push_back(blk);
        if (bf.bc == BCType::Dirichlet) tsum += blk;
        bscale = std::max(bscale, blk.norm());
      }
      if (tsum.norm() > kGuard * bscale)
        throw NumericalError("uniform translation produces traction at vertex " +
                             std::to_string(s) + ", face " +
                             std::to_string(sf.face));
      disc.stencils[sf.face][sf.corner] = std::move(st);
    }

    if (opt.audit)
      disc.audit.entries[s] = detail::coercivity_impl(kern, ls, opt);
  };

  unsigned nthreads = opt.threads > 0 ? unsigned(opt.threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
  nthreads = std::min<unsigned>(nthreads, std::max<std::size_t>(m.verts.size(), 1));

  Accum total;
  if (nthreads <= 1) {
    for (std::size_t s = 0; s < m.verts.size(); ++s) process(s, total);
  } else {
    std::vector<Accum> accs(nthreads);
    std::mutex err_mutex;
    std::exception_ptr err;
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (unsigned t = 0; t < nthreads; ++t)
      pool.emplace_back([&, t] {
        constexpr std::size_t chunk = 64;
        for (;;) {
          const std::size_t begin = next.fetch_add(chunk);
          if (begin >= regions.size()) return;
          const std::size_t end = std::min(begin + chunk, regions.size());
          for (std::size_t s = begin; s < end; ++s) {
            try {
              process(s, accs[t]);
            } catch (...) {
              std::lock_guard<std::mutex> lk(err_mutex);
              if (!err) err = std::current_exception();
              return;
            }
          }
        }
      });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
    for (const Accum& a : accs) total.merge(a);
  }

  disc.stats.interior_regions = total.interior_regions;
  disc.stats.boundary_regions = total.boundary_regions;
  disc.stats.interior_disp_rows_min =
      total.interior_regions ? total.disp_min : 0;
  disc.stats.interior_disp_rows_max = total.disp_max;
  disc.stats.interior_disp_rows_mean =
      total.interior_regions
          ? double(total.disp_sum) / double(total.interior_regions)
          : 0.0;
  disc.stats.max_system_rows = total.max_rows;
  disc.min_rcond = total.min_rcond;
  return disc;
}

CoercivityEntry coercivity_audit(const InteractionRegion& r, const Mesh& m,
                                 const SubGeometry& sg,
                                 const IsotropicField& mat,
                                 const DiscOptions& opt) {
  (void)sg;
  const detail::RegionKernel kern(r, m, mat, opt);
  CoercivityEntry entry;
  entry.vertex = r.vertex;
  if (r.cells.size() < 2) {
    entry.skipped = true;
    entry.theta = std::numeric_limits<double>::quiet_NaN();
    return entry;
  }
  const LocalSolve ls = solve_local(kern.assemble(), r.vertex);
  return detail::coercivity_impl(kern, ls, opt);
}

}  // namespace mpsaw
