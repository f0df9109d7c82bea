#include "bikeqn/statespace.hpp"

#include <array>
#include <limits>
#include <numeric>

namespace bikeqn {

StateLayout::StateLayout(const BikeShareModel& model) {
    station_offset_.reserve(model.station_count);
    station_phases_.reserve(model.station_count);
    for (const StationSpec& st : model.stations) {
        station_offset_.push_back(coord_count_);
        station_phases_.push_back(st.phases());
        coord_count_ += st.phases();
    }
    road_offset_ = coord_count_;
    coord_count_ += 2 * model.road_count();
}

int StateLayout::station_total(std::span<const int> coords, int i) const {
    int total = 0;
    for (int v = 0; v < station_phases_[i]; ++v) total += coords[station_offset_[i] + v];
    return total;
}

NetworkState unpack_state(const BikeShareModel& model, const StateLayout& layout,
                          std::span<const int> coords) {
    NetworkState st;
    st.parked.resize(model.station_count);
    for (int i = 0; i < model.station_count; ++i) {
        st.parked[i].resize(layout.station_phases(i));
        for (int v = 0; v < layout.station_phases(i); ++v)
            st.parked[i][v] = coords[layout.station_offset(i) + v];
    }
    st.riding.resize(model.road_count());
    for (int r = 0; r < model.road_count(); ++r)
        st.riding[r] = {coords[layout.road_offset(r, 1)], coords[layout.road_offset(r, 2)]};
    return st;
}

namespace {

constexpr std::uint64_t kSat = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
    return (a > kSat - b) ? kSat : a + b;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0) return 0;
    if (a > kSat / b) return kSat;
    return a * b;
}

// Number of ways to park t bikes at one station with `phases` phase slots
// and a station total of at most K: compositions of t into `phases`
// nonnegative parts (each part is then automatically <= K).
std::uint64_t station_ways(int t, int phases) {
    // C(t + phases - 1, phases - 1)
    std::uint64_t acc = 1;
    for (int k = 1; k <= phases - 1; ++k) {
        // multiply incrementally to postpone overflow
        acc = sat_mul(acc, static_cast<std::uint64_t>(t) + k);
        acc /= static_cast<std::uint64_t>(k);
    }
    return acc;
}

}  // namespace

std::uint64_t state_count(const BikeShareModel& model) {
    const int fleet = model.fleet();
    const int cap = model.dock_capacity;

    // ways[t] = number of ways to park t bikes across the stations seen so far
    std::vector<std::uint64_t> ways(fleet + 1, 0), next(fleet + 1, 0);
    ways[0] = 1;
    for (int i = 0; i < model.station_count; ++i) {
        std::fill(next.begin(), next.end(), 0);
        int phases = model.stations[i].phases();
        for (int t = 0; t <= std::min(cap, fleet); ++t) {
            std::uint64_t w = station_ways(t, phases);
            for (int s = 0; s + t <= fleet; ++s)
                if (ways[s]) next[s + t] = sat_add(next[s + t], sat_mul(ways[s], w));
        }
        ways.swap(next);
    }

    const int road_coords = 2 * model.road_count();
    std::uint64_t total = 0;
    for (int parked = 0; parked <= fleet; ++parked) {
        if (!ways[parked]) continue;
        // remaining bikes distributed over road coordinates without bound
        total = sat_add(total, sat_mul(ways[parked], station_ways(fleet - parked, road_coords)));
    }
    return total;
}

void ensure_state_space_within(const BikeShareModel& model, std::uint64_t cap) {
    std::uint64_t count = state_count(model);
    if (count > cap)
        throw StateSpaceTooLarge("state space has " + std::to_string(count) +
                                     " states, exceeding the cap of " + std::to_string(cap),
                                 count, cap);
}

void for_each_state(const BikeShareModel& model, const StateLayout& layout,
                    const std::function<void(std::span<const int>)>& visit,
                    StatePartition partition) {
    const int fleet = model.fleet();
    const int cap = model.dock_capacity;
    const int coords = layout.coord_count();
    const int road_begin = layout.road_coord_begin();
    std::vector<int> state(coords, 0);

    // Recursion over coordinate positions in canonical order; `remaining`
    // is the fleet not yet placed, `station_room` the capacity left at the
    // current station.
    auto rec = [&](auto&& self, int pos, int remaining, int station, int station_room) -> void {
        if (pos == coords - 1) {
            state[pos] = remaining;
            visit(std::span<const int>(state));
            return;
        }
        int lo = 0;
        int hi;
        if (pos >= road_begin) {
            hi = remaining;
        } else {
            hi = std::min(remaining, station_room);
        }
        if (pos == 0) {
            lo = std::max(lo, partition.first_min);
            hi = std::min(hi, partition.first_max);
        }
        for (int c = lo; c <= hi; ++c) {
            state[pos] = c;
            if (pos >= road_begin) {
                self(self, pos + 1, remaining - c, station, 0);
                continue;
            }
            const int offset = layout.station_offset(station);
            const int phases = layout.station_phases(station);
            const bool last_phase = (pos - offset) == phases - 1;
            if (last_phase)
                self(self, pos + 1, remaining - c, station + 1,
                     station + 1 < model.station_count ? cap : 0);
            else
                self(self, pos + 1, remaining - c, station, station_room - c);
        }
    };
    rec(rec, 0, fleet, 0, cap);
}

std::vector<std::vector<int>> enumerate_states(const BikeShareModel& model, std::uint64_t cap) {
    ensure_state_space_within(model, cap);
    StateLayout layout(model);
    std::vector<std::vector<int>> out;
    out.reserve(state_count(model));
    for_each_state(model, layout, [&](std::span<const int> coords) {
        out.emplace_back(coords.begin(), coords.end());
    });
    return out;
}

}  // namespace bikeqn
