#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "sskinetic/eval_direct.hpp"
#include "sskinetic/fft3.hpp"
#include "sskinetic/grid.hpp"
#include "sskinetic/kernel.hpp"
#include "sskinetic/term_table.hpp"

namespace sskinetic {

struct PlanOptions {
  // Value stored at the u = 0 sample of every kernel field. Any finite value
  // yields the same flux (the two convolution pieces' diagonal contributions
  // cancel pointwise); 0 matches the direct evaluator's diagonal skip
  // exactly and is the default. Nonzero values exist for the invariance test.
  Real diag_value = 0.0;
};

namespace fastdetail {

// Destination treatment of an accumulation bucket:
//   Msym: symmetric 3x3 kernel component field, contracted with G at the node
//   Mgen: general 3x3 (row from a beta vector, column dotted with G)
//   Vg:   vector field dotted with G, result times the node velocity v
//   Vd:   vector field added directly (row index lives on beta or v)
//   Sc:   scalar field times the node velocity v
enum BucketKind { kMsym = 0, kMgen, kVg, kVd, kSc };

struct MacJob {
  int comp;   // kernel component index within the mode pair
  int src;    // source-field id (see source enumeration in the .cpp)
  Real coeff; // term sign * coefficient (the minus of the second piece folded)
};

struct BucketSlot {
  int kind;  // BucketKind
  int pa;    // alpha radial power, weight |v|^(2 pa)
  int comp;  // Msym: 0..5, Mgen: row*3+col, Vg/Vd: 0..2, Sc: 0
  std::vector<MacJob> jobs;
};

struct KernelComp {
  BetaKind kind;
  int comp = 0;
  bool odd = false;          // odd comps store Im of the spectrum, even Re
  std::vector<Real> spec;    // cplx_count values, 1/P^3 prefolded
};

struct ModePairPlan {
  Real weight = 0;           // pair multiplicity, folded into mw
  ArrayX mw, nw;             // destination / source node weights
  std::vector<KernelComp> comps;
};

struct ChannelPlan {
  bool active = false;
  std::vector<BucketSlot> schedule;     // shared by all mode pairs
  std::vector<char> src_needed;         // [n_src_ids]
  std::vector<ModePairPlan> pairs;
};

}  // namespace fastdetail

/**
 * Precomputed state for the separated-kernel convolution evaluator: padded
 * transform size, forward FFTs of every needed L^e L^e' beta-component field
 * per channel and unique expanded mode pair, node weight fields, and the
 * term-driven accumulation schedule. Immutable after construction and
 * shareable across threads; per-call scratch lives in the evaluator.
 */
struct ConvolutionPlan {
  VelocityGrid grid{0, 0, 0};
  int pad = 0;
  std::unique_ptr<Fft3> fft;
  ArrayX v2;                      // |v|^2 per node
  std::array<ArrayX, 3> vcomp;    // node velocity components
  fastdetail::ChannelPlan ch[2];
  std::string kernel_desc;

  std::size_t memory_bytes() const;
};

/// Samples and transforms all kernel fields for (grid, kernel); the table
/// supplies the term metadata that fixes which beta components are needed.
ConvolutionPlan make_plan(const VelocityGrid& g, const SSKernel& kernel,
                          const TermTable& table,
                          const PlanOptions& opt = {});

/// Collision flux via padded-FFT convolutions; matches the direct evaluator
/// on separable kernels up to FFT roundoff. Outermost-layer flux zeroed.
VectorField collision_flux_fast(const ConvolutionPlan& plan,
                                const ScalarField& f,
                                Real f_min = default_f_min);

/// Divergence (zero-extension D^+) of collision_flux_fast.
ScalarField collision_rhs_fast(const ConvolutionPlan& plan,
                               const ScalarField& f,
                               Real f_min = default_f_min);

}  // namespace sskinetic
