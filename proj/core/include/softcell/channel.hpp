#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "softcell/fading.hpp"
#include "softcell/rng.hpp"

namespace softcell {

// One drawn uplink of `cells` receivers and `cells + 1` user groups of size
// `users`.  Group m sits between receivers m and m+1: receiver m+1 hears it
// with the gain row a[m+1] while receiver m hears the same group with the
// gain row b[m] — the shared group is what couples adjacent receivers.
// Rows are stored row-major, `users` entries each.
struct ChannelRealization {
  std::size_t cells = 0;
  std::size_t users = 0;
  std::vector<std::complex<double>> a;
  std::vector<std::complex<double>> b;

  std::span<const std::complex<double>> a_row(std::size_t cell) const {
    return {a.data() + cell * users, users};
  }
  std::span<const std::complex<double>> b_row(std::size_t cell) const {
    return {b.data() + cell * users, users};
  }
};

// Hermitian inner product with the first argument conjugated.
std::complex<double> inner(std::span<const std::complex<double>> first,
                           std::span<const std::complex<double>> second);

double sq_norm(std::span<const std::complex<double>> v);

// The Gram matrix I + rho * H H^dagger of a drawn uplink.  It is Hermitian
// tridiagonal because only adjacent receivers share a user group:
//   diag[m]    = 1 + rho * (|a_m|^2 + |b_m|^2)
//   offdiag[m] = rho * <a_{m+1} ; b_m>          (entry (m, m+1))
struct TridiagonalHermitian {
  std::vector<double> diag;
  std::vector<std::complex<double>> offdiag;
  double rho = 0.0;    // per-user SNR the matrix was built with
  double power = 0.0;  // total received power rho * users
  std::size_t users = 0;

  std::size_t cells() const { return diag.size(); }
};

// Draw order is fixed (per cell: the a row, then the b row) so that results
// are reproducible from the seed alone.
ChannelRealization sample_channel(const FadingModel& model_a, const FadingModel& model_b,
                                  std::size_t cells, std::size_t users, Rng& rng);

TridiagonalHermitian gram_tridiagonal(const ChannelRealization& ch, double rho);

// Binary dump of a realization: u64 cells, u64 users, then the a rows and
// the b rows as float64 (re, im) pairs.  Everything little-endian.
void write_channel(const ChannelRealization& ch, const std::string& path);
ChannelRealization read_channel(const std::string& path);

// Scheduling protocols: wideband (all user groups transmit together, per-user
// SNR P/K) and time sharing (each user of a group gets a 1/K time slot at
// full power, so a slot behaves like a single-user uplink at SNR P).
enum class Protocol { Wideband, Tdma };

std::string_view protocol_name(Protocol protocol);
Protocol parse_protocol(const std::string& name);

}  // namespace softcell
