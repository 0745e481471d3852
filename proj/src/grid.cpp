#include "nematic/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "nematic/errors.hpp"

namespace nematic {

std::string to_string(BoundaryMode mode) {
  return mode == BoundaryMode::periodic ? "periodic" : "slip-channel";
}

BoundaryMode boundary_mode_from_string(const std::string& s) {
  if (s == "periodic") return BoundaryMode::periodic;
  if (s == "slip-channel" || s == "slip_channel") return BoundaryMode::slip_channel;
  throw std::invalid_argument("unknown domain mode '" + s + "' (expected periodic or slip-channel)");
}

void DomainSpec::validate() const {
  if (dim != 2 && dim != 3) throw std::invalid_argument("domain: dim must be 2 or 3");
  for (int a = 0; a < dim; ++a) {
    if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a])) {
      throw std::invalid_argument("domain: lengths must be positive");
    }
    if (resolution[a] < 4 || resolution[a] % 2 != 0) {
      throw std::invalid_argument("domain: resolution on axis " + std::to_string(a) +
                                  " must be even and >= 4, got " + std::to_string(resolution[a]));
    }
  }
  if (mode == BoundaryMode::slip_channel && (wall_axis < 0 || wall_axis >= dim)) {
    throw std::invalid_argument("domain: wall_axis out of range");
  }
}

double DomainSpec::volume() const {
  double v = 1.0;
  for (int a = 0; a < dim; ++a) v *= lengths[a];
  return v;
}

// ----------------------------------------------------------------- FftEngine

/// Owns FFTW plans and aligned work buffers for one grid shape.
/// Plans are built with FFTW_ESTIMATE so results are reproducible run to run.
class FftEngine {
 public:
  FftEngine(int rank, const IntVec& extent) {
    int n[3];
    // FFTW is row-major with the last index fastest; our storage is x-fastest.
    for (int r = 0; r < rank; ++r) n[r] = extent[rank - 1 - r];
    npts_ = 1;
    for (int r = 0; r < rank; ++r) npts_ *= n[r];
    nspec_ = npts_ / n[rank - 1] * (n[rank - 1] / 2 + 1);
    real_ = fftw_alloc_real(npts_);
    cplx_ = fftw_alloc_complex(nspec_);
    if (real_ == nullptr || cplx_ == nullptr) throw std::bad_alloc();
    forward_ = fftw_plan_dft_r2c(rank, n, real_, cplx_, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r(rank, n, cplx_, real_, FFTW_ESTIMATE);
  }
  FftEngine(const FftEngine&) = delete;
  FftEngine& operator=(const FftEngine&) = delete;
  ~FftEngine() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(real_);
    fftw_free(cplx_);
  }

  void forward(const double* in, std::complex<double>* out) {
    std::memcpy(real_, in, npts_ * sizeof(double));
    fftw_execute(forward_);
    std::memcpy(static_cast<void*>(out), cplx_, nspec_ * sizeof(fftw_complex));
  }
  void backward(const std::complex<double>* in, double* out) {
    std::memcpy(cplx_, static_cast<const void*>(in), nspec_ * sizeof(fftw_complex));
    fftw_execute(backward_);
    std::memcpy(out, real_, npts_ * sizeof(double));
  }
  std::size_t spectrum_size() const { return nspec_; }

 private:
  std::size_t npts_ = 0;
  std::size_t nspec_ = 0;
  double* real_ = nullptr;
  fftw_complex* cplx_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

// ---------------------------------------------------------------------- Grid

Grid::Grid(const DomainSpec& domain) : domain_(domain) {
  domain_.validate();
  for (int a = 0; a < 3; ++a) {
    if (a >= domain_.dim) {
      domain_.resolution[a] = 1;
      extent_[a] = 1;
      continue;
    }
    const bool wall = domain_.mode == BoundaryMode::slip_channel && a == domain_.wall_axis;
    extent_[a] = wall ? 2 * domain_.resolution[a] : domain_.resolution[a];
    period_[a] = wall ? 2.0 * domain_.lengths[a] : domain_.lengths[a];
    spacing_[a] = period_[a] / extent_[a];
    kscale_[a] = 2.0 * std::numbers::pi / period_[a];
  }
  npts_ = static_cast<std::size_t>(extent_[0]) * extent_[1] * extent_[2];
  weight_ = domain_.volume() / static_cast<double>(npts_);
  fft_ = std::make_shared<FftEngine>(domain_.dim, extent_);
  nspec_ = fft_->spectrum_size();
}

double Grid::min_spacing() const {
  double h = spacing_[0];
  for (int a = 1; a < dim(); ++a) h = std::min(h, spacing_[a]);
  return h;
}

IntVec Grid::unravel(std::size_t idx) const noexcept {
  IntVec i{};
  i[0] = static_cast<int>(idx % extent_[0]);
  idx /= extent_[0];
  i[1] = static_cast<int>(idx % extent_[1]);
  i[2] = static_cast<int>(idx / extent_[1]);
  return i;
}

double Grid::coordinate(int axis, std::size_t idx) const { return unravel(idx)[axis] * spacing_[axis]; }

int Grid::dealias_limit(int axis) const noexcept {
  if (axis >= dim()) return 0;
  return (extent_[axis] - 1) / 3;
}

Spectrum Grid::forward(const Field& f) const {
  check_shape(f, "forward transform");
  Spectrum s(nspec_);
  fft_->forward(f.data(), s.data());
  return s;
}

Field Grid::synthesize(const Spectrum& s) const {
  Field out(npts_);
  fft_->backward(s.data(), out.data());
  return out;
}

Field Grid::inverse(const Spectrum& s) const {
  Field out = synthesize(s);
  const double scale = 1.0 / static_cast<double>(npts_);
  for (auto& v : out) v *= scale;
  return out;
}

IntVec Grid::spectral_index(std::size_t pos) const noexcept {
  const int h0 = extent_[0] / 2 + 1;
  IntVec m{};
  int j0 = static_cast<int>(pos % h0);
  pos /= h0;
  int j1 = static_cast<int>(pos % extent_[1]);
  int j2 = static_cast<int>(pos / extent_[1]);
  m[0] = j0;
  m[1] = j1 > extent_[1] / 2 ? j1 - extent_[1] : j1;
  m[2] = j2 > extent_[2] / 2 ? j2 - extent_[2] : j2;
  return m;
}

namespace {

int wrap(int m, int n) {
  int r = m % n;
  return r < 0 ? r + n : r;
}

}  // namespace

std::complex<double> Grid::lookup(const Spectrum& s, const IntVec& m) const {
  int j0 = wrap(m[0], extent_[0]);
  int j1 = wrap(m[1], extent_[1]);
  int j2 = wrap(m[2], extent_[2]);
  const int h0 = extent_[0] / 2 + 1;
  if (j0 >= h0) {
    j0 = wrap(-m[0], extent_[0]);
    j1 = wrap(-m[1], extent_[1]);
    j2 = wrap(-m[2], extent_[2]);
    return std::conj(s[j0 + static_cast<std::size_t>(h0) * (j1 + static_cast<std::size_t>(extent_[1]) * j2)]);
  }
  return s[j0 + static_cast<std::size_t>(h0) * (j1 + static_cast<std::size_t>(extent_[1]) * j2)];
}

void Grid::add_real_wave(Spectrum& s, const IntVec& m, std::complex<double> c) const {
  const int h0 = extent_[0] / 2 + 1;
  auto slot = [&](const IntVec& v) -> std::complex<double>& {
    const int j0 = wrap(v[0], extent_[0]);
    const int j1 = wrap(v[1], extent_[1]);
    const int j2 = wrap(v[2], extent_[2]);
    return s[j0 + static_cast<std::size_t>(h0) * (j1 + static_cast<std::size_t>(extent_[1]) * j2)];
  };
  const IntVec neg{-m[0], -m[1], -m[2]};
  const int j0 = wrap(m[0], extent_[0]);
  if (j0 == 0 || (extent_[0] % 2 == 0 && j0 == extent_[0] / 2)) {
    // Both k and -k live in the stored half.
    slot(m) += c;
    slot(neg) += std::conj(c);
  } else if (j0 < h0) {
    slot(m) += c;
  } else {
    slot(neg) += std::conj(c);
  }
}

double Grid::derivative_wavenumber(int axis, int m) const noexcept {
  if (axis >= dim()) return 0.0;
  if (extent_[axis] % 2 == 0 && std::abs(m) == extent_[axis] / 2) return 0.0;
  return kscale_[axis] * m;
}

Field Grid::derivative(const Field& f, int axis) const {
  if (axis < 0 || axis >= dim()) throw DimensionError("derivative: axis out of range");
  Spectrum s = forward(f);
  for (std::size_t p = 0; p < nspec_; ++p) {
    const double k = derivative_wavenumber(axis, spectral_index(p)[axis]);
    s[p] *= std::complex<double>(0.0, k);
  }
  return inverse(s);
}

VectorField Grid::grad(const Field& f) const {
  Spectrum s = forward(f);
  VectorField out(dim());
  Spectrum work(nspec_);
  for (int a = 0; a < dim(); ++a) {
    for (std::size_t p = 0; p < nspec_; ++p) {
      const double k = derivative_wavenumber(a, spectral_index(p)[a]);
      work[p] = s[p] * std::complex<double>(0.0, k);
    }
    out[a] = inverse(work);
  }
  return out;
}

GridTensor Grid::grad(const VectorField& v) const {
  GridTensor g(static_cast<int>(v.size()), dim(), npts_);
  for (int c = 0; c < g.rows; ++c) {
    auto gc = grad(v[c]);
    for (int a = 0; a < dim(); ++a) g.at(c, a) = std::move(gc[a]);
  }
  return g;
}

Field Grid::div(const VectorField& v) const {
  check_shape(v, dim(), "div");
  Spectrum acc(nspec_, {0.0, 0.0});
  for (int a = 0; a < dim(); ++a) {
    Spectrum s = forward(v[a]);
    for (std::size_t p = 0; p < nspec_; ++p) {
      acc[p] += s[p] * std::complex<double>(0.0, derivative_wavenumber(a, spectral_index(p)[a]));
    }
  }
  return inverse(acc);
}

VectorField Grid::div(const GridTensor& t) const {
  if (t.cols != dim()) throw DimensionError("div: tensor column count must equal the dimension");
  VectorField out(t.rows);
  for (int r = 0; r < t.rows; ++r) {
    VectorField row(dim());
    for (int c = 0; c < dim(); ++c) row[c] = t.at(r, c);
    out[r] = div(row);
  }
  return out;
}

Field Grid::laplacian(const Field& f) const {
  Spectrum s = forward(f);
  for (std::size_t p = 0; p < nspec_; ++p) {
    const IntVec m = spectral_index(p);
    double k2 = 0.0;
    for (int a = 0; a < dim(); ++a) {
      const double k = derivative_wavenumber(a, m[a]);
      k2 += k * k;
    }
    s[p] *= -k2;
  }
  return inverse(s);
}

void Grid::dealias_spectrum(Spectrum& s) const {
  for (std::size_t p = 0; p < nspec_; ++p) {
    const IntVec m = spectral_index(p);
    for (int a = 0; a < dim(); ++a) {
      if (std::abs(m[a]) > dealias_limit(a)) {
        s[p] = 0.0;
        break;
      }
    }
  }
}

Field Grid::dealias(const Field& f) const {
  Spectrum s = forward(f);
  dealias_spectrum(s);
  return inverse(s);
}

double Grid::integral(const Field& f) const {
  double acc = 0.0;
  for (double v : f) acc += v;
  return acc * weight_;
}

double Grid::inner(const Field& a, const Field& b) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < npts_; ++i) acc += a[i] * b[i];
  return acc * weight_;
}

double Grid::inner(const VectorField& a, const VectorField& b) const {
  if (a.size() != b.size()) throw DimensionError("inner: component count mismatch");
  double acc = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) acc += inner(a[c], b[c]);
  return acc;
}

double Grid::inner(const GridTensor& a, const GridTensor& b) const {
  if (a.rows != b.rows || a.cols != b.cols) throw DimensionError("inner: tensor shape mismatch");
  double acc = 0.0;
  for (std::size_t e = 0; e < a.entries.size(); ++e) acc += inner(a.entries[e], b.entries[e]);
  return acc;
}

void Grid::check_shape(const Field& f, const char* what) const {
  if (f.size() != npts_) {
    std::ostringstream msg;
    msg << what << ": field has " << f.size() << " values, grid has " << npts_;
    throw DimensionError(msg.str());
  }
}

void Grid::check_shape(const VectorField& v, int ncomp, const char* what) const {
  if (static_cast<int>(v.size()) != ncomp) {
    std::ostringstream msg;
    msg << what << ": expected " << ncomp << " components, got " << v.size();
    throw DimensionError(msg.str());
  }
  for (const auto& f : v) check_shape(f, what);
}

}  // namespace nematic
