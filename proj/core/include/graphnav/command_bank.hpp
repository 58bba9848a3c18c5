#pragma once

#include <array>
#include <cstddef>
#include <string_view>

#include "graphnav/simulator.hpp"

namespace graphnav {

/// Fixed command bank for the discrete action variants. "back" exists as a
/// bank slot but maps below the simulator's v >= 0 clamp, so recorded
/// forward-driving corpora never label it and executing it stops in place.
constexpr std::size_t kBankSize = 7;

inline std::array<sim::ControlCommand, kBankSize> command_bank(
    const sim::SimParams& p) {
  return {{{0.0, 0.0},                       // stop
           {0.8 * p.v_max, 0.0},             // forward
           {0.6 * p.v_max, 0.5 * p.omega_max},   // forward-left
           {0.6 * p.v_max, -0.5 * p.omega_max},  // forward-right
           {0.1 * p.v_max, p.omega_max},     // hard-left
           {0.1 * p.v_max, -p.omega_max},    // hard-right
           {-0.5 * p.v_max, 0.0}}};          // back
}

inline constexpr std::array<std::string_view, kBankSize> kBankNames = {
    "stop",      "forward",   "forward-left", "forward-right",
    "hard-left", "hard-right", "back"};

/// Index of the bank command nearest to (v, omega) in command space.
inline int nearest_bank_command(const sim::ControlCommand& cmd,
                                const sim::SimParams& p) {
  const auto bank = command_bank(p);
  int best = 0;
  double best_d = 1e300;
  for (std::size_t k = 0; k < bank.size(); ++k) {
    const double dv = cmd.v - bank[k].v;
    const double dw = cmd.omega - bank[k].omega;
    const double d = dv * dv + dw * dw;
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(k);
    }
  }
  return best;
}

}  // namespace graphnav
