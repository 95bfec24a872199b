#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include "hetsched/model.hpp"

namespace hetsched {

/// Discrete-event state shared by the list, skip-extended and induced
/// generation maps: current time, running tasks per pool, remaining capacity,
/// and dependency status. Tasks completing at time t release their resources
/// and successors at t (half-open occupancy).
class EventSimulator {
 public:
  explicit EventSimulator(const Instance& inst)
      : inst_(&inst),
        start_(inst.num_tasks(), 0.0),
        end_(inst.num_tasks(), 0.0),
        pool_(inst.num_tasks(), 0),
        state_(inst.num_tasks(), State::Waiting),
        missing_preds_(inst.num_tasks(), 0),
        running_(inst.num_pools()),
        available_(inst.num_pools()) {
    for (TaskIndex v = 0; v < inst.num_tasks(); ++v) missing_preds_[v] = inst.preds(v).size();
    for (PoolIndex c = 0; c < inst.num_pools(); ++c) available_[c] = inst.pool(c).capacity;
  }

  double now() const { return now_; }
  std::size_t dispatched() const { return order_.size(); }
  bool done() const { return order_.size() == inst_->num_tasks(); }
  bool any_running() const {
    return std::any_of(running_.begin(), running_.end(), [](const auto& r) { return !r.empty(); });
  }

  bool is_dispatched(TaskIndex v) const { return state_[v] != State::Waiting; }
  bool is_ready(TaskIndex v) const { return state_[v] == State::Waiting && missing_preds_[v] == 0; }
  const ResourceVector& available(PoolIndex c) const { return available_[c]; }

  /// Unmasked: precedence satisfied, compatible, and demand fits the pool now.
  bool can_dispatch(TaskIndex v, PoolIndex c) const {
    return is_ready(v) && inst_->is_action(v, c) && fits(inst_->task(v).demand, available_[c]);
  }

  std::vector<Action> unmasked_actions() const {
    std::vector<Action> out;
    for (TaskIndex v = 0; v < inst_->num_tasks(); ++v) {
      if (!is_ready(v)) continue;
      for (PoolIndex c = 0; c < inst_->num_pools(); ++c)
        if (can_dispatch(v, c)) out.push_back({v, c});
    }
    return out;
  }

  void dispatch(TaskIndex v, PoolIndex c) {
    if (!can_dispatch(v, c))
      throw DomainError(ErrorKind::MalformedRollout,
                        "action (" + std::to_string(inst_->task(v).id) + "," +
                            std::to_string(inst_->pool(c).id) + ") is masked");
    start_[v] = now_;
    end_[v] = now_ + inst_->actual_time(v, c);
    pool_[v] = c;
    state_[v] = State::Running;
    running_[c].push_back(v);
    recompute_available(c);
    order_.push_back(v);
  }

  /// Moves time to the next completion event and releases every task that
  /// completes then, on all pools. Returns false when nothing is running.
  bool advance() {
    double next = std::numeric_limits<double>::infinity();
    for (const auto& r : running_)
      for (TaskIndex v : r) next = std::min(next, end_[v]);
    if (next == std::numeric_limits<double>::infinity()) return false;
    now_ = next;
    for (PoolIndex c = 0; c < running_.size(); ++c) {
      auto& r = running_[c];
      bool changed = false;
      for (std::size_t i = 0; i < r.size();) {
        TaskIndex v = r[i];
        if (end_[v] <= now_) {
          state_[v] = State::Done;
          for (TaskIndex w : inst_->succs(v)) --missing_preds_[w];
          r.erase(r.begin() + static_cast<std::ptrdiff_t>(i));
          changed = true;
        } else {
          ++i;
        }
      }
      if (changed) recompute_available(c);
    }
    return true;
  }

  /// Schedule over the dispatched tasks (undispatched entries are zero).
  Schedule schedule() const { return {start_, pool_, order_}; }

  /// Identifies the state for memoized search: time plus the partial schedule.
  std::vector<double> state_key() const {
    std::vector<double> key;
    key.reserve(1 + 2 * start_.size());
    key.push_back(now_);
    for (TaskIndex v = 0; v < start_.size(); ++v) {
      key.push_back(state_[v] == State::Waiting ? -1.0 : start_[v]);
      key.push_back(state_[v] == State::Waiting ? -1.0 : static_cast<double>(pool_[v]));
    }
    return key;
  }

 private:
  enum class State { Waiting, Running, Done };

  void recompute_available(PoolIndex c) {
    available_[c] = inst_->pool(c).capacity;
    for (TaskIndex v : running_[c])
      for (std::size_t k = 0; k < available_[c].size(); ++k)
        available_[c][k] -= inst_->task(v).demand[k];
  }

  const Instance* inst_;
  double now_ = 0.0;
  std::vector<double> start_;
  std::vector<double> end_;
  std::vector<PoolIndex> pool_;
  std::vector<State> state_;
  std::vector<std::size_t> missing_preds_;
  std::vector<std::vector<TaskIndex>> running_;
  std::vector<ResourceVector> available_;
  std::vector<TaskIndex> order_;
};

}  // namespace hetsched
