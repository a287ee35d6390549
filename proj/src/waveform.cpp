#include "isac/waveform.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>

#include <boost/random/uniform_real_distribution.hpp>

#include "isac/statistics.hpp"

namespace isac {

const char* to_string(Hypothesis h) { return h == Hypothesis::h0 ? "H0" : "H1"; }
const char* to_string(GenerationMode m) {
  return m == GenerationMode::physical ? "physical" : "statistical";
}

CMatrix FramePlan::assemble(const CMatrix& x_p, const CMatrix& x_d) const {
  const Eigen::Index rows = x_p.cols() > 0 ? x_p.rows() : x_d.rows();
  CMatrix x = CMatrix::Zero(rows, length);
  for (int i = 0; i < pilot_count(); ++i) x.col(pilot_positions[i]) = x_p.col(i);
  for (int i = 0; i < data_count(); ++i) x.col(data_positions[i]) = x_d.col(i);
  return x;
}

CMatrix FramePlan::pilot_columns(const CMatrix& x) const {
  CMatrix out(x.rows(), pilot_count());
  for (int i = 0; i < pilot_count(); ++i) out.col(i) = x.col(pilot_positions[i]);
  return out;
}

CMatrix FramePlan::data_columns(const CMatrix& x) const {
  CMatrix out(x.rows(), data_count());
  for (int i = 0; i < data_count(); ++i) out.col(i) = x.col(data_positions[i]);
  return out;
}

FramePlan build_frame_plan(int length, int pilot_count, PilotPattern pattern) {
  if (pilot_count <= 0 || pilot_count >= length) {
    throw InvalidSplit("build_frame_plan: need 0 < L_p < L (L_p = " + std::to_string(pilot_count) +
                       ", L = " + std::to_string(length) + ")");
  }
  FramePlan plan;
  plan.length = length;
  std::vector<bool> is_pilot(static_cast<std::size_t>(length), false);
  if (pattern == PilotPattern::prefix) {
    for (int i = 0; i < pilot_count; ++i) is_pilot[i] = true;
  } else {
    const int stride = (length + pilot_count - 1) / pilot_count;
    const bool fits = static_cast<long long>(pilot_count - 1) * stride < length;
    for (int i = 0; i < pilot_count; ++i) {
      const long long pos =
          fits ? static_cast<long long>(i) * stride : static_cast<long long>(i) * length / pilot_count;
      is_pilot[static_cast<std::size_t>(pos)] = true;
    }
  }
  for (int l = 0; l < length; ++l) {
    (is_pilot[l] ? plan.pilot_positions : plan.data_positions).push_back(l);
  }
  return plan;
}

CVector TransmitPlan::fbar_p() const { return std::sqrt(double(frame.pilot_count())) * f_p; }
CMatrix TransmitPlan::fbar_d() const { return std::sqrt(double(frame.data_count())) * f_d; }
CMatrix TransmitPlan::pilot_block() const { return f_p * s_p.transpose(); }

TransmitPlan build_transmit_plan(const SystemConfig& cfg, const Scenario& s, RandomStream& rng) {
  TransmitPlan plan;
  plan.frame = build_frame_plan(cfg.frame_length, cfg.pilot_length, cfg.pilot_pattern);
  const int n = cfg.n_tx;
  const int lp = plan.frame.pilot_count();
  const int ld = plan.frame.data_count();

  plan.f_p = s.b_t * std::sqrt(cfg.pilot_power_w() / (double(lp) * s.b_t.squaredNorm()));

  plan.s_p = CVector::Ones(lp);
  if (cfg.random_pilot_phases) {
    boost::random::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    for (int i = 0; i < lp; ++i) plan.s_p(i) = std::polar(1.0, phase(rng));
  }

  plan.f_d = CMatrix::Zero(n, n);
  const double pd = cfg.data_power_w();
  if (cfg.n_users > 0 && pd > 0.0) {
    for (int k = 0; k < cfg.n_users; ++k) plan.f_d.col(k) = steering_vector(cfg.user_aods_deg[k], n);
    plan.f_d *= std::sqrt(pd / (double(ld) * plan.f_d.squaredNorm()));
  }
  return plan;
}

CMatrix draw_payload(const SystemConfig& cfg, RandomStream& rng) {
  CMatrix s(cfg.n_tx, cfg.data_length());
  ComplexNormal(rng).fill(s);
  return s;
}

ReceivedFrame synthesize_physical(const Scenario& s, const TransmitPlan& plan, double noise_power,
                                  Hypothesis h, RandomStream& rng) {
  const Eigen::Index n = plan.f_p.size();
  CMatrix payload(n, plan.frame.data_count());
  ComplexNormal cn(rng);
  cn.fill(payload);
  CMatrix noise(s.a_t.size(), plan.frame.length);
  cn.fill(noise, noise_power);

  const CMatrix x = plan.frame.assemble(plan.pilot_block(), plan.f_d * payload);
  CMatrix channel = s.h_e;
  if (h == Hypothesis::h1) channel += s.alpha * s.a_t * s.b_t.adjoint();

  ReceivedFrame out;
  out.y = channel * x + noise;
  out.hypothesis = h;
  out.mode = GenerationMode::physical;
  return out;
}

StatisticalGenerator::StatisticalGenerator(const NullModel& model, const TransmitPlan& plan,
                                           cplx alpha, Hypothesis h)
    : mean_(model.u), hypothesis_(h) {
  const cplx a = (h == Hypothesis::h1) ? alpha : cplx(0.0);
  if (a == cplx(0.0)) {
    root_ = cholesky_factor(model.sigma_bar);
    return;
  }
  const cplx scale = a * model.lambda_p;
  for (int i = 0; i < plan.frame.pilot_count(); ++i) {
    mean_.col(plan.frame.pilot_positions[i]) += scale * plan.s_p(i) * model.a_t;
  }
  const double inflate = std::norm(a) * model.lambda_d_bar_sq / double(model.frame_length);
  const CMatrix cov = model.sigma_bar.matrix() + inflate * model.a_t * model.a_t.adjoint();
  root_ = cholesky_factor(HermitianMatrix(cov));
}

ReceivedFrame StatisticalGenerator::from_noise(const CMatrix& z) const {
  ReceivedFrame out;
  out.y = mean_;
  out.y.noalias() += root_.triangularView<Eigen::Lower>() * z;
  out.hypothesis = hypothesis_;
  out.mode = GenerationMode::statistical;
  return out;
}

ReceivedFrame StatisticalGenerator::draw(RandomStream& rng) const {
  CMatrix z(mean_.rows(), mean_.cols());
  ComplexNormal(rng).fill(z);
  return from_noise(z);
}

ReceivedFrame synthesize_statistical(const NullModel& model, const TransmitPlan& plan, cplx alpha,
                                     Hypothesis h, RandomStream& rng) {
  return StatisticalGenerator(model, plan, alpha, h).draw(rng);
}

// ---------------------------------------------------------------------------
// Binary container

namespace {

constexpr std::array<char, 8> kMagic{'I', 'S', 'A', 'C', 'F', 'R', 'M', '1'};
constexpr std::size_t kHeaderBytes = 32;

static_assert(std::endian::native == std::endian::little, "frame container assumes little-endian");

template <class T>
void put(std::vector<char>& buf, std::size_t offset, T value) {
  std::memcpy(buf.data() + offset, &value, sizeof(T));
}

template <class T>
T get(const std::vector<char>& buf, std::size_t offset) {
  T value;
  std::memcpy(&value, buf.data() + offset, sizeof(T));
  return value;
}

}  // namespace

void write_frame(const std::filesystem::path& path, const ReceivedFrame& frame) {
  const auto m = static_cast<std::uint32_t>(frame.y.rows());
  const auto l = static_cast<std::uint32_t>(frame.y.cols());
  std::vector<char> buf(kHeaderBytes + std::size_t(m) * l * 16, 0);
  std::memcpy(buf.data(), kMagic.data(), kMagic.size());
  put(buf, 8, m);
  put(buf, 12, l);
  put(buf, 16, static_cast<std::uint8_t>(frame.hypothesis));
  put(buf, 17, static_cast<std::uint8_t>(frame.mode));
  put(buf, 24, frame.seed);
  std::memcpy(buf.data() + kHeaderBytes, frame.y.data(), std::size_t(m) * l * 16);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw FormatError("write to '" + path.string() + "' failed");
}

ReceivedFrame read_frame(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open frame file '" + path.string() + "'");
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < kHeaderBytes || !std::equal(kMagic.begin(), kMagic.end(), buf.begin())) {
    throw FormatError("'" + path.string() + "' is not a frame container (bad magic)");
  }
  const auto m = get<std::uint32_t>(buf, 8);
  const auto l = get<std::uint32_t>(buf, 12);
  const auto h = get<std::uint8_t>(buf, 16);
  const auto mode = get<std::uint8_t>(buf, 17);
  if (m == 0 || l == 0 || h > 1 || mode > 1) {
    throw FormatError("'" + path.string() + "' has an invalid header");
  }
  const std::size_t body = std::size_t(m) * l * 16;
  if (buf.size() != kHeaderBytes + body) {
    throw FormatError("'" + path.string() + "' has " + std::to_string(buf.size() - kHeaderBytes) +
                      " body bytes, expected " + std::to_string(body));
  }
  ReceivedFrame f;
  f.y.resize(m, l);
  std::memcpy(f.y.data(), buf.data() + kHeaderBytes, body);
  f.hypothesis = static_cast<Hypothesis>(h);
  f.mode = static_cast<GenerationMode>(mode);
  f.seed = get<std::uint64_t>(buf, 24);
  return f;
}

}  // namespace isac
