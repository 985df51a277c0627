#include "sskinetic/kernel.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace sskinetic {

SSKernel::SSKernel(std::vector<ModeTriplet> channel1,
                   std::vector<ModeTriplet> channel2, Real u_eps)
    : u_eps_(u_eps) {
  if (channel1.empty() || channel2.empty())
    throw std::invalid_argument("SSKernel: both channels need >= 1 mode");
  ch_[0] = std::move(channel1);
  ch_[1] = std::move(channel2);
}

int SSKernel::jprime(int channel) const {
  if (channel < 1 || channel > 2)
    throw std::invalid_argument("SSKernel: channel must be 1 or 2");
  return int(ch_[channel - 1].size());
}

const std::vector<ModeTriplet>& SSKernel::channel(int c) const {
  if (c < 1 || c > 2)
    throw std::invalid_argument("SSKernel: channel must be 1 or 2");
  return ch_[c - 1];
}

const UnivariateBasis& SSKernel::expanded_L(int channel, int j) const {
  const auto& modes = this->channel(channel);
  const int jp = (j + 1) / 2;
  if (j < 1 || jp > int(modes.size()))
    throw std::invalid_argument("SSKernel: expanded mode out of range");
  return modes[jp - 1].L;
}

const UnivariateBasis& SSKernel::expanded_M(int channel, int j) const {
  const auto& modes = this->channel(channel);
  const int jp = (j + 1) / 2;
  if (j < 1 || jp > int(modes.size()))
    throw std::invalid_argument("SSKernel: expanded mode out of range");
  return (j % 2 == 1) ? modes[jp - 1].M : modes[jp - 1].N;
}

const UnivariateBasis& SSKernel::expanded_N(int channel, int j) const {
  const auto& modes = this->channel(channel);
  const int jp = (j + 1) / 2;
  if (j < 1 || jp > int(modes.size()))
    throw std::invalid_argument("SSKernel: expanded mode out of range");
  return (j % 2 == 1) ? modes[jp - 1].N : modes[jp - 1].M;
}

Real eval_g(const SSKernel& k, int channel, Real au, Real av, Real avp) {
  Real g = 0;
  for (const ModeTriplet& m : k.channel(channel))
    g += m.L(au) * (m.M(av) * m.N(avp) + m.N(av) * m.M(avp));
  return g;
}

KernelMatrix eval_kernel_separated(const SSKernel& k, const Vec3& v,
                                   const Vec3& vp, Real u_eps) {
  const Vec3 u = v - vp;
  const Real au = u.norm();
  if (au < u_eps || au == 0) return KernelMatrix::Zero();
  const Vec3 uh = u / au;
  const Mat3 P = Mat3::Identity() - uh * uh.transpose();
  const Vec3 r = v + vp;
  const Vec3 pr = P * r;
  const Real g1 = eval_g(k, 1, au, v.norm(), vp.norm());
  const Real g2 = eval_g(k, 2, au, v.norm(), vp.norm());
  return g1 * g1 * pr.squaredNorm() * P +
         (g2 * g2 - g1 * g1) * (pr * pr.transpose());
}

KernelMatrix eval_kernel_separated(const SSKernel& k, const Vec3& v,
                                   const Vec3& vp) {
  return eval_kernel_separated(k, v, vp, k.u_eps());
}

KernelMatrix SSKernel::eval(const Vec3& v, const Vec3& vp) const {
  return eval_kernel_separated(*this, v, vp, u_eps_);
}

std::string SSKernel::describe() const {
  return "ss_kernel(J'=" + std::to_string(jprime(1)) + "," +
         std::to_string(jprime(2)) + ")";
}

std::vector<Real> SSKernel::parameters() const {
  std::vector<Real> p;
  for (const auto& modes : ch_)
    for (const ModeTriplet& m : modes)
      for (const UnivariateBasis* b : {&m.L, &m.M, &m.N}) {
        const auto bp = b->parameters();
        p.insert(p.end(), bp.begin(), bp.end());
      }
  return p;
}

void SSKernel::set_parameters(const std::vector<Real>& p) {
  std::size_t at = 0;
  for (auto& modes : ch_)
    for (ModeTriplet& m : modes)
      for (UnivariateBasis* b : {&m.L, &m.M, &m.N}) {
        const std::size_t n = b->parameters().size();
        if (at + n > p.size())
          throw std::invalid_argument("set_parameters: vector too short");
        b->set_parameters(std::vector<Real>(p.begin() + at, p.begin() + at + n));
        at += n;
      }
  if (at != p.size())
    throw std::invalid_argument("set_parameters: vector too long");
}

bool SSKernel::same_structure(const SSKernel& other) const {
  for (int c = 0; c < 2; ++c) {
    if (ch_[c].size() != other.ch_[c].size()) return false;
    for (std::size_t m = 0; m < ch_[c].size(); ++m) {
      if (ch_[c][m].L.family() != other.ch_[c][m].L.family() ||
          ch_[c][m].M.family() != other.ch_[c][m].M.family() ||
          ch_[c][m].N.family() != other.ch_[c][m].N.family())
        return false;
    }
  }
  return true;
}

KernelMatrix eval_kernel_geometric(const SSKernel& k, const Vec3& v,
                                   const Vec3& vp, Real u_eps) {
  const Vec3 u = v - vp;
  const Real au = u.norm();
  if (au < u_eps)
    throw std::domain_error("eval_kernel_geometric: degenerate |u|");
  const Vec3 uh = u / au;
  const Mat3 P = Mat3::Identity() - uh * uh.transpose();
  const Vec3 r = v + vp;
  const Vec3 pr = P * r;
  const Real apr = pr.norm();
  if (apr < u_eps)
    throw std::domain_error("eval_kernel_geometric: degenerate |Pr|");
  const Vec3 rt = pr / apr;
  const Vec3 s = u.cross(r);
  const Real as = s.norm();
  if (as < u_eps * au)
    throw std::domain_error("eval_kernel_geometric: degenerate |u x r|");
  const Vec3 st = s / as;
  const Real g1 = eval_g(k, 1, au, v.norm(), vp.norm());
  const Real g2 = eval_g(k, 2, au, v.norm(), vp.norm());
  const Real gs2 = g1 * g1 * apr * apr;
  const Real gr2 = g2 * g2 * apr * apr;
  const Mat3 core = gr2 * rt * rt.transpose() + gs2 * st * st.transpose();
  return P * core * P;
}

Vec3 kernel_divergence_v(const PairKernel& k, const Vec3& v, const Vec3& vp,
                         Real delta) {
  Vec3 out = Vec3::Zero();
  for (int j = 0; j < 3; ++j) {
    Vec3 e = Vec3::Zero();
    e[j] = delta;
    const Mat3 d = (k.eval(v + e, vp) - k.eval(v - e, vp)) / (2 * delta);
    out += d.col(j);
  }
  return out;
}

Vec3 kernel_divergence_vprime(const PairKernel& k, const Vec3& v,
                              const Vec3& vp, Real delta) {
  Vec3 out = Vec3::Zero();
  for (int j = 0; j < 3; ++j) {
    Vec3 e = Vec3::Zero();
    e[j] = delta;
    const Mat3 d = (k.eval(v, vp + e) - k.eval(v, vp - e)) / (2 * delta);
    out += d.col(j);
  }
  return out;
}

namespace {

Mat3 random_rotation(std::mt19937_64& rng) {
  // Uniform rotation from a normalized random quaternion.
  std::normal_distribution<Real> n(0, 1);
  Eigen::Quaternion<Real> q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

Vec3 random_vec(std::mt19937_64& rng, Real scale) {
  std::normal_distribution<Real> n(0, scale);
  return Vec3(n(rng), n(rng), n(rng));
}

}  // namespace

Real AdmissibilityReport::worst() const {
  return std::max({rotation, permutation, orthogonality, psd, sign_symmetry});
}

AdmissibilityReport check_admissibility(const PairKernel& k, int sample_count,
                                        unsigned rng_seed) {
  std::mt19937_64 rng(rng_seed);
  AdmissibilityReport rep;
  const Real tiny = 1e-300;
  int done = 0;
  while (done < sample_count) {
    const Vec3 v = random_vec(rng, 1.2);
    const Vec3 vp = random_vec(rng, 1.2);
    const Vec3 u = v - vp;
    if (u.norm() < 0.05) continue;  // keep clear of the degenerate diagonal
    ++done;

    const Mat3 w = k.eval(v, vp);
    const Real scale = std::max(w.cwiseAbs().maxCoeff(), tiny);

    const Mat3 R = random_rotation(rng);
    const Mat3 wrot = k.eval(R * v, R * vp);
    rep.rotation = std::max(
        rep.rotation,
        (wrot - R * w * R.transpose()).cwiseAbs().maxCoeff() / scale);

    rep.permutation = std::max(
        rep.permutation, (w - k.eval(vp, v)).cwiseAbs().maxCoeff() / scale);

    rep.orthogonality =
        std::max(rep.orthogonality,
                 (w * u).cwiseAbs().maxCoeff() / (scale * u.norm() + tiny));

    Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (w + w.transpose()));
    const Real lmin = es.eigenvalues().minCoeff();
    rep.psd = std::max(rep.psd, std::max<Real>(0, -lmin) / scale);

    rep.sign_symmetry = std::max(
        rep.sign_symmetry, (w - k.eval(-v, -vp)).cwiseAbs().maxCoeff() / scale);
  }
  return rep;
}

KernelMatrix LandauLikeKernel::eval(const Vec3& v, const Vec3& vp) const {
  const Vec3 u = v - vp;
  const Real au = u.norm();
  if (au == 0) return KernelMatrix::Zero();
  const Vec3 uh = u / au;
  const Mat3 P = Mat3::Identity() - uh * uh.transpose();
  return (c_ / std::max(au, reg_)) * P;
}

std::string LandauLikeKernel::describe() const {
  return "landau_like(c=" + std::to_string(c_) + ",reg=" + std::to_string(reg_) +
         ")";
}

KernelMatrix ConstantPKernel::eval(const Vec3& v, const Vec3& vp) const {
  const Vec3 u = v - vp;
  const Real au = u.norm();
  if (au == 0) return KernelMatrix::Zero();
  const Vec3 uh = u / au;
  return c_ * (Mat3::Identity() - uh * uh.transpose());
}

std::string ConstantPKernel::describe() const {
  return "constant_p(c=" + std::to_string(c_) + ")";
}

SSKernel gaussian_ss(int jprime, Real amp1, Real amp2) {
  if (jprime < 1) throw std::invalid_argument("gaussian_ss: J' must be >= 1");
  std::vector<ModeTriplet> ch1, ch2;
  const Real amp[2] = {amp1, amp2};
  for (int c = 1; c <= 2; ++c) {
    auto& modes = (c == 1) ? ch1 : ch2;
    for (int jp = 1; jp <= jprime; ++jp) {
      const Real a = amp[c - 1] * std::pow(2.0, 1 - jp);
      const Real lam = (1.8 + 0.3 * c) * (1 + 0.2 * (jp - 1));
      const Real mu = (2.3 + 0.2 * c) * (1 + 0.15 * (jp - 1));
      const Real nu = mu + 0.5 * (jp - 1);
      modes.push_back(ModeTriplet{
          UnivariateBasis::gaussian_sum({a}, {lam}),
          UnivariateBasis::gaussian_sum({1.0}, {mu}),
          UnivariateBasis::gaussian_sum({1.0}, {nu}),
      });
    }
  }
  return SSKernel(std::move(ch1), std::move(ch2));
}

namespace {

nlohmann::json basis_to_json(const UnivariateBasis& b) {
  nlohmann::json j;
  j["family"] = b.family_name();
  j["x_max"] = b.x_max();
  j["parameters"] = b.parameters();
  return j;
}

UnivariateBasis basis_from_json(const nlohmann::json& j) {
  const std::string family = j.at("family").get<std::string>();
  const Real x_max = j.at("x_max").get<Real>();
  const auto p = j.at("parameters").get<std::vector<Real>>();
  if (family == "gaussian_sum") {
    if (p.size() % 2 != 0)
      throw std::runtime_error("kernel file: odd gaussian parameter count");
    const std::size_t q = p.size() / 2;
    return UnivariateBasis::gaussian_sum(
        std::vector<Real>(p.begin(), p.begin() + q),
        std::vector<Real>(p.begin() + q, p.end()), x_max);
  }
  if (family == "cubic_spline") return UnivariateBasis::cubic_spline(p, x_max);
  if (family == "constant") {
    if (p.size() != 1)
      throw std::runtime_error("kernel file: constant needs one parameter");
    return UnivariateBasis::constant(p[0], x_max);
  }
  throw std::runtime_error("kernel file: unknown basis family " + family);
}

}  // namespace

void save_kernel_json(const std::string& path, const SSKernel& k) {
  nlohmann::json j;
  j["format"] = "ss-kernel-v1";
  for (int c = 1; c <= 2; ++c) {
    nlohmann::json modes = nlohmann::json::array();
    for (const ModeTriplet& m : k.channel(c)) {
      nlohmann::json mj;
      mj["L"] = basis_to_json(m.L);
      mj["M"] = basis_to_json(m.M);
      mj["N"] = basis_to_json(m.N);
      modes.push_back(mj);
    }
    j["channel" + std::to_string(c)] = modes;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_kernel_json: cannot open " + path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("save_kernel_json: write failed");
}

SSKernel load_kernel_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_kernel_json: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("load_kernel_json: bad JSON in " + path + ": " +
                             e.what());
  }
  if (j.value("format", "") != "ss-kernel-v1")
    throw std::runtime_error("load_kernel_json: unsupported format field");
  std::vector<ModeTriplet> ch[2];
  for (int c = 1; c <= 2; ++c) {
    const auto& modes = j.at("channel" + std::to_string(c));
    for (const auto& mj : modes)
      ch[c - 1].push_back(ModeTriplet{basis_from_json(mj.at("L")),
                                      basis_from_json(mj.at("M")),
                                      basis_from_json(mj.at("N"))});
  }
  return SSKernel(std::move(ch[0]), std::move(ch[1]));
}

}  // namespace sskinetic
