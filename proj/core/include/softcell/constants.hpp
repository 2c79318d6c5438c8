#pragma once

namespace softcell {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
inline constexpr double kLn2 = 0.69314718055994530941723212145817657;

// Rates and offsets are carried in nats internally; bits only at the edges.
inline constexpr double nats_to_bits(double nats) { return nats / kLn2; }
inline constexpr double bits_to_nats(double bits) { return bits * kLn2; }

// 3 dB per factor of two: the bit -> dB conversion used for power offsets.
inline constexpr double kThreeDb = 3.0102999566398119521373889472449303;

}  // namespace softcell
