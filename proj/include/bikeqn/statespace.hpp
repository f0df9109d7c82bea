#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "bikeqn/model.hpp"

namespace bikeqn {

// Flat coordinate layout of one network state. The canonical coordinate
// sequence lists every station's per-phase parked counts first (stations
// ascending, phases ascending), then every road's class-1 and class-2
// riding counts (roads in model order). Putting the road coordinates last
// maximizes pruning during enumeration: they are bounded only by the fleet.
class StateLayout {
public:
    explicit StateLayout(const BikeShareModel& model);

    int coord_count() const { return coord_count_; }
    int station_offset(int i) const { return station_offset_[i]; }
    int station_phases(int i) const { return station_phases_[i]; }
    int road_offset(int r, int cls) const { return road_offset_ + 2 * r + (cls - 1); }
    int road_coord_begin() const { return road_offset_; }

    int station_total(std::span<const int> coords, int i) const;

private:
    int coord_count_ = 0;
    int road_offset_ = 0;
    std::vector<int> station_offset_;
    std::vector<int> station_phases_;
};

// One point of the state space in structured form.
struct NetworkState {
    std::vector<std::vector<int>> parked;            // [station][phase]
    std::vector<std::array<int, 2>> riding;          // [road][class-1]
};

NetworkState unpack_state(const BikeShareModel& model, const StateLayout& layout,
                          std::span<const int> coords);

// Exact cardinality of the state space, by capped convolution over station
// totals and a stars-and-bars count for the road coordinates. Saturates at
// UINT64_MAX on overflow.
std::uint64_t state_count(const BikeShareModel& model);

// Throws StateSpaceTooLarge (reporting count and cap) when state_count
// exceeds `cap`.
void ensure_state_space_within(const BikeShareModel& model, std::uint64_t cap);

// Restricts enumeration to states whose first coordinate lies in
// [first_min, first_max]. Disjoint ranges partition the state space; each
// partition is a pure computation, so partitions can run on separate
// threads and their results merge by concatenation in range order.
struct StatePartition {
    int first_min = 0;
    int first_max = std::numeric_limits<int>::max();
};

// Visits every state exactly once in ascending lexicographic order of the
// canonical coordinate sequence. The visitor receives the flat coordinates;
// the span is only valid during the call.
void for_each_state(const BikeShareModel& model, const StateLayout& layout,
                    const std::function<void(std::span<const int>)>& visit,
                    StatePartition partition = {});

// Convenience wrapper used by tests and small instances.
std::vector<std::vector<int>> enumerate_states(const BikeShareModel& model,
                                               std::uint64_t cap = 10'000'000);

}  // namespace bikeqn
