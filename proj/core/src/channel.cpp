#include "softcell/channel.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

#include "softcell/check.hpp"

namespace softcell {
namespace {

void put_u64(std::ostream& out, std::uint64_t value) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  std::uint64_t value = 0;
  for (int i = 0; i < 8; ++i) value |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return value;
}

void put_f64(std::ostream& out, double value) {
  put_u64(out, std::bit_cast<std::uint64_t>(value));
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

constexpr std::size_t kMaxDimension = std::size_t{1} << 24;

}  // namespace

std::complex<double> inner(std::span<const std::complex<double>> first,
                           std::span<const std::complex<double>> second) {
  require(first.size() == second.size(), "inner product of mismatched lengths");
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t i = 0; i < first.size(); ++i) acc += std::conj(first[i]) * second[i];
  return acc;
}

double sq_norm(std::span<const std::complex<double>> v) {
  double acc = 0.0;
  for (const std::complex<double>& x : v) acc += std::norm(x);
  return acc;
}

ChannelRealization sample_channel(const FadingModel& model_a, const FadingModel& model_b,
                                  std::size_t cells, std::size_t users, Rng& rng) {
  require(cells >= 1, "channel needs at least one cell");
  require(users >= 1, "channel needs at least one user per group");
  ChannelRealization ch;
  ch.cells = cells;
  ch.users = users;
  ch.a.resize(cells * users);
  ch.b.resize(cells * users);
  for (std::size_t m = 0; m < cells; ++m) {
    for (std::size_t l = 0; l < users; ++l) ch.a[m * users + l] = model_a.sample_gain(rng);
    for (std::size_t l = 0; l < users; ++l) ch.b[m * users + l] = model_b.sample_gain(rng);
  }
  return ch;
}

TridiagonalHermitian gram_tridiagonal(const ChannelRealization& ch, double rho) {
  require(ch.cells >= 1, "empty channel realization");
  require(std::isfinite(rho) && rho >= 0.0, "rho must be finite and non-negative");
  TridiagonalHermitian g;
  g.rho = rho;
  g.users = ch.users;
  g.power = rho * static_cast<double>(ch.users);
  g.diag.resize(ch.cells);
  g.offdiag.resize(ch.cells - 1);
  for (std::size_t m = 0; m < ch.cells; ++m) {
    g.diag[m] = 1.0 + rho * (sq_norm(ch.a_row(m)) + sq_norm(ch.b_row(m)));
  }
  for (std::size_t m = 0; m + 1 < ch.cells; ++m) {
    g.offdiag[m] = rho * inner(ch.a_row(m + 1), ch.b_row(m));
  }
  return g;
}

void write_channel(const ChannelRealization& ch, const std::string& path) {
  require(ch.a.size() == ch.cells * ch.users && ch.b.size() == ch.cells * ch.users,
          "realization storage does not match its dimensions");
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot open channel file for writing: " + path);
  put_u64(out, ch.cells);
  put_u64(out, ch.users);
  for (const std::complex<double>& x : ch.a) {
    put_f64(out, x.real());
    put_f64(out, x.imag());
  }
  for (const std::complex<double>& x : ch.b) {
    put_f64(out, x.real());
    put_f64(out, x.imag());
  }
  out.flush();
  require(out.good(), "write failed: " + path);
}

ChannelRealization read_channel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open channel file: " + path);
  ChannelRealization ch;
  ch.cells = get_u64(in);
  ch.users = get_u64(in);
  require(in.good(), "truncated channel file: " + path);
  require(ch.cells >= 1 && ch.cells <= kMaxDimension, "implausible cell count in " + path);
  require(ch.users >= 1 && ch.users <= kMaxDimension, "implausible user count in " + path);
  const std::size_t entries = ch.cells * ch.users;
  ch.a.resize(entries);
  ch.b.resize(entries);
  for (std::complex<double>& x : ch.a) {
    const double re = get_f64(in);
    const double im = get_f64(in);
    x = {re, im};
  }
  for (std::complex<double>& x : ch.b) {
    const double re = get_f64(in);
    const double im = get_f64(in);
    x = {re, im};
  }
  require(in.good(), "truncated channel file: " + path);
  in.peek();
  require(in.eof(), "trailing bytes in channel file: " + path);
  return ch;
}

std::string_view protocol_name(Protocol protocol) {
  return protocol == Protocol::Wideband ? "wb" : "tdma";
}

Protocol parse_protocol(const std::string& name) {
  if (name == "wb") return Protocol::Wideband;
  if (name == "tdma") return Protocol::Tdma;
  throw std::invalid_argument("unknown protocol '" + name + "' (expected wb or tdma)");
}

}  // namespace softcell
