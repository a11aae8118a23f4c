#include "peanolab/corrpath.h"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include <boost/random/normal_distribution.hpp>

#include "peanolab/errors.h"
#include "peanolab/parallel.h"
#include "peanolab/rng.h"

namespace peanolab {

CovSpec build_cov_spec(double kappa_prime, double alpha_scale) {
  if (!(kappa_prime > 4.0 && kappa_prime <= 8.0)) {
    throw DomainError("kappa' must lie in (4, 8], got " + std::to_string(kappa_prime));
  }
  if (!(alpha_scale > 0.0) || !std::isfinite(alpha_scale)) {
    throw DomainError("alpha scale must be positive and finite");
  }
  CovSpec spec;
  spec.kappa_prime = kappa_prime;
  spec.gamma = 4.0 / std::sqrt(kappa_prime);
  spec.alpha_scale = alpha_scale;
  // gamma^2 = 16/kappa'; the cosine argument simplifies to 4 pi / kappa'.
  spec.rho = -std::cos(4.0 * std::numbers::pi / kappa_prime);
  if (kappa_prime == 8.0) spec.rho = 0.0;  // cos(pi/2) leaves a 6e-17 residue
  return spec;
}

void check_window(const PathPair& path, Window w) {
  if (w.a < 0 || w.a > w.b || w.b > path.steps()) {
    throw DomainError("window [" + std::to_string(w.a) + ", " + std::to_string(w.b) +
                      "] outside path of " + std::to_string(path.steps()) + " steps");
  }
}

namespace {

void check_steps(Index n) {
  if (n < 1) throw DomainError("step count must be >= 1");
  // Beyond 2^48 samples neither the allocation nor the f64 time axis is sane.
  if (n > (Index{1} << 48)) throw SizeError("step count exceeds 2^48");
}

}  // namespace

PathPair sample_brownian_pair(const CovSpec& spec, Index n, double dt, std::uint64_t seed,
                              std::uint64_t trial) {
  check_steps(n);
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("dt must be positive and finite");
  const double horizon = static_cast<double>(n) * dt;
  if (!std::isfinite(horizon) || horizon > 0x1.0p52) {
    throw SizeError("n * dt exceeds the precision of the time accumulator");
  }

  PathPair path;
  path.spec = spec;
  path.kind = PathKind::brownian;
  path.dt = dt;
  path.L.assign(static_cast<std::size_t>(n) + 1, 0.0);
  path.R.assign(static_cast<std::size_t>(n) + 1, 0.0);

  const double scale = std::sqrt(spec.alpha_scale * dt);
  const double ortho = std::sqrt(std::max(0.0, 1.0 - spec.rho * spec.rho));
  const Index chunks = (n + kBrownianChunk - 1) / kBrownianChunk;

  // Increments are written in place (slot i+1 holds step i), then summed.
  parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t c) {
    CounterRng rng(seed, trial, static_cast<std::uint32_t>(c));
    boost::random::normal_distribution<double> gauss;  // ziggurat
    const Index begin = static_cast<Index>(c) * kBrownianChunk;
    const Index end = std::min(n, begin + kBrownianChunk);
    for (Index i = begin; i < end; ++i) {
      const double z1 = gauss(rng);
      const double z2 = gauss(rng);
      path.L[i + 1] = scale * z1;
      path.R[i + 1] = scale * (spec.rho * z1 + ortho * z2);
    }
  });
  for (std::size_t i = 1; i < path.L.size(); ++i) {
    path.L[i] += path.L[i - 1];
    path.R[i] += path.R[i - 1];
  }
  return path;
}

LatticeStepLaw lattice_step_law(double rho) {
  if (!(rho >= -1.0 && rho <= 1.0)) throw DomainError("correlation must lie in [-1, 1]");
  return {(1.0 + rho) / 4.0, (1.0 - rho) / 4.0};
}

PathPair sample_lattice_pair(const CovSpec& spec, Index n, std::uint64_t seed,
                             std::uint64_t trial) {
  check_steps(n);
  const LatticeStepLaw law = lattice_step_law(spec.rho);
  const double cut_pp = law.same;
  const double cut_mm = 2.0 * law.same;
  const double cut_pm = 2.0 * law.same + law.opposite;

  PathPair path;
  path.spec = spec;
  path.kind = PathKind::lattice;
  path.dt = 1.0;
  path.L.assign(static_cast<std::size_t>(n) + 1, 0.0);
  path.R.assign(static_cast<std::size_t>(n) + 1, 0.0);

  // (+,+), (-,-), (+,-), (-,+)
  static constexpr double kStepL[4] = {1.0, -1.0, 1.0, -1.0};
  static constexpr double kStepR[4] = {1.0, -1.0, -1.0, 1.0};
  double l = 0.0;
  double r = 0.0;
  for (Index c = 0; c * kBrownianChunk < n; ++c) {
    CounterRng rng(seed, trial, static_cast<std::uint32_t>(c));
    const Index end = std::min(n, (c + 1) * kBrownianChunk);
    for (Index i = c * kBrownianChunk; i < end; ++i) {
      // branch-free: step types are near-equiprobable and mispredict badly
      const double u = rng.uniform();
      const int k = (u >= cut_pp) + (u >= cut_mm) + (u >= cut_pm);
      l += kStepL[k];
      r += kStepR[k];
      path.L[i + 1] = l;
      path.R[i + 1] = r;
    }
  }
  return path;
}

double EmpiricalCov::correlation() const {
  const double denom = std::sqrt(var_L * var_R);
  return denom > 0.0 ? cov / denom : 0.0;
}

EmpiricalCov empirical_cov(const PathPair& path) {
  const Index n = path.steps();
  if (n < 2) throw DomainError("empirical covariance needs at least 2 increments");
  double mean_l = 0.0, mean_r = 0.0;
  for (Index i = 0; i < n; ++i) {
    mean_l += path.L[i + 1] - path.L[i];
    mean_r += path.R[i + 1] - path.R[i];
  }
  mean_l /= static_cast<double>(n);
  mean_r /= static_cast<double>(n);
  double sll = 0.0, srr = 0.0, slr = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double dl = path.L[i + 1] - path.L[i] - mean_l;
    const double dr = path.R[i + 1] - path.R[i] - mean_r;
    sll += dl * dl;
    srr += dr * dr;
    slr += dl * dr;
  }
  const double norm = static_cast<double>(n - 1) * path.dt;
  return {sll / norm, srr / norm, slr / norm};
}

PathPair coarsen_to_lattice(const PathPair& path) {
  if (path.kind == PathKind::lattice) return path;
  PathPair out;
  out.spec = path.spec;
  out.kind = PathKind::lattice;
  out.dt = 1.0;
  out.L.assign(path.L.size(), 0.0);
  out.R.assign(path.R.size(), 0.0);
  for (std::size_t i = 1; i < path.L.size(); ++i) {
    out.L[i] = out.L[i - 1] + (path.L[i] < path.L[i - 1] ? -1.0 : 1.0);
    out.R[i] = out.R[i - 1] + (path.R[i] < path.R[i - 1] ? -1.0 : 1.0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Binary persistence

namespace {

constexpr std::array<char, 4> kMagic = {'P', 'N', 'L', 'B'};
constexpr std::size_t kHeaderBytes = 4 + 2 + 1 + 8 + 8 + 8 + 8;

template <typename U>
void put_le(std::string& buf, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    buf.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
  }
}

void put_f64(std::string& buf, double value) { put_le(buf, std::bit_cast<std::uint64_t>(value)); }

template <typename U>
U get_le(const unsigned char* p) {
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(p[i]) << (8 * i);
  return value;
}

double get_f64(const unsigned char* p) { return std::bit_cast<double>(get_le<std::uint64_t>(p)); }

void read_exact(std::istream& in, unsigned char* dst, std::size_t count, const char* what) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(count));
  if (static_cast<std::size_t>(in.gcount()) != count) {
    throw FormatError(std::string("truncated path file while reading ") + what);
  }
}

}  // namespace

void save_path(const PathPair& path, std::ostream& out) {
  if (path.L.size() != path.R.size() || path.L.empty()) {
    throw ShapeError("path coordinates must be non-empty and of equal length");
  }
  std::string header;
  header.append(kMagic.data(), kMagic.size());
  put_le<std::uint16_t>(header, kPathFormatVersion);
  put_le<std::uint8_t>(header, static_cast<std::uint8_t>(path.kind));
  put_f64(header, path.spec.kappa_prime);
  put_f64(header, path.spec.alpha_scale);
  put_f64(header, path.dt);
  put_le<std::uint64_t>(header, static_cast<std::uint64_t>(path.steps()));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));

  constexpr std::size_t kPairsPerBlock = 1 << 14;
  std::string block;
  block.reserve(kPairsPerBlock * 16);
  for (std::size_t i = 0; i < path.L.size(); ++i) {
    put_f64(block, path.L[i]);
    put_f64(block, path.R[i]);
    if (block.size() >= kPairsPerBlock * 16) {
      out.write(block.data(), static_cast<std::streamsize>(block.size()));
      block.clear();
    }
  }
  out.write(block.data(), static_cast<std::streamsize>(block.size()));
  if (!out) throw FormatError("failed writing path data");
}

void save_path(const PathPair& path, const std::filesystem::path& destination) {
  std::ofstream out(destination, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + destination.string() + " for writing");
  save_path(path, out);
}

PathPair load_path(std::istream& in) {
  std::array<unsigned char, kHeaderBytes> header{};
  read_exact(in, header.data(), header.size(), "header");
  if (std::memcmp(header.data(), kMagic.data(), kMagic.size()) != 0) {
    throw FormatError("bad magic bytes (expected PNLB)");
  }
  const auto version = get_le<std::uint16_t>(header.data() + 4);
  if (version != kPathFormatVersion) {
    throw FormatError("unsupported path format version " + std::to_string(version));
  }
  const auto kind = header[6];
  if (kind > 1) throw FormatError("unknown path kind " + std::to_string(kind));
  const double kappa = get_f64(header.data() + 7);
  const double alpha = get_f64(header.data() + 15);
  const double dt = get_f64(header.data() + 23);
  const auto n = get_le<std::uint64_t>(header.data() + 31);
  if (n < 1 || n > (std::uint64_t{1} << 48)) throw FormatError("implausible step count");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw FormatError("non-positive dt");

  PathPair path;
  try {
    path.spec = build_cov_spec(kappa, alpha);
  } catch (const DomainError& e) {
    throw FormatError(std::string("invalid covariance header: ") + e.what());
  }
  path.kind = static_cast<PathKind>(kind);
  path.dt = dt;
  const std::size_t count = static_cast<std::size_t>(n) + 1;
  path.L.resize(count);
  path.R.resize(count);

  constexpr std::size_t kPairsPerBlock = 1 << 14;
  std::vector<unsigned char> block(kPairsPerBlock * 16);
  for (std::size_t done = 0; done < count;) {
    const std::size_t take = std::min(kPairsPerBlock, count - done);
    read_exact(in, block.data(), take * 16, "samples");
    for (std::size_t k = 0; k < take; ++k) {
      path.L[done + k] = get_f64(block.data() + 16 * k);
      path.R[done + k] = get_f64(block.data() + 16 * k + 8);
    }
    done += take;
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError("trailing bytes after path data");
  }
  return path;
}

PathPair load_path(const std::filesystem::path& source) {
  std::ifstream in(source, std::ios::binary);
  if (!in) throw FormatError("cannot open " + source.string());
  try {
    return load_path(in);
  } catch (const FormatError& e) {
    throw FormatError(source.string() + ": " + e.what());
  }
}

}  // namespace peanolab
