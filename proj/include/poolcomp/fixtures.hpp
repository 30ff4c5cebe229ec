#pragma once

#include <cstdint>

#include "poolcomp/group_data.hpp"

namespace poolcomp {

/// The 8-schools coaching experiments: schools A..H, effects and standard errors.
StudyDataset eight_schools();

inline constexpr std::uint64_t kStatesSeed = 2007;
inline constexpr std::size_t kStatesCount = 51;

/// Synthetic stand-in for a 51-state league table with large true spread:
/// true scores ~ N(240, 8^2), standard errors uniform on [0.8, 1.6], observed
/// score = truth + N(0, se^2). Groups are S01..S51. Deterministic in `seed`.
StudyDataset synthetic_states(std::uint64_t seed = kStatesSeed);

}  // namespace poolcomp
