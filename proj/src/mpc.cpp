#include "gridcross/mpc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "gridcross/error.hpp"

namespace gridcross::mpc {

void Params::validate() const {
  auto positive = [](const char* key, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidConfiguration(key, "must be positive");
  };
  positive("sampling_time_s", ts);
  if (horizon < 1) throw InvalidConfiguration("horizon_steps", "must be at least 1");
  positive("headway_s", headway);
  positive("headway_relax_s", headway_relax);
  positive("slack_max_m", slack_max);
  positive("min_distance_m", min_distance);
  positive("weight_speed", q);
  positive("weight_input", r);
  positive("qp_tolerance", tolerance);
  if (!(v_min >= 0.0)) throw InvalidConfiguration("speed_min_kmh", "must be nonnegative");
  if (!(v_max > v_min)) throw InvalidConfiguration("speed_max_kmh", "must exceed the minimum speed");
  if (!std::isfinite(omega)) throw InvalidConfiguration("weight_slack", "must be finite");
}

const Agent& World::agent(int id) const {
  auto it = std::lower_bound(agents.begin(), agents.end(), id,
                             [](const Agent& a, int v) { return a.id < v; });
  if (it == agents.end() || it->id != id) throw Error("unknown vehicle id " + std::to_string(id));
  return *it;
}

bool Rollout::present(int t) const { return p.at(static_cast<std::size_t>(t)) <= path_length; }

Rollout predict(const Agent& other, double path_length, const Params& params) {
  Rollout r;
  r.id = other.id;
  r.path = other.path;
  r.path_length = path_length;
  r.p.resize(static_cast<std::size_t>(params.horizon) + 1);
  r.v.resize(r.p.size());
  r.p[0] = other.state.p;
  r.v[0] = std::clamp(other.state.v, params.v_min, params.v_max);
  for (std::size_t t = 1; t < r.p.size(); ++t) {
    r.p[t] = r.p[t - 1] + params.ts * r.v[t - 1];
    r.v[t] = std::clamp(r.v[t - 1] + params.ts * other.last_input, params.v_min, params.v_max);
  }
  return r;
}

std::vector<Sighting> predicted_frontal(const Agent& ego, std::span<const Rollout> others,
                                        const World& world, const Params& params) {
  std::vector<Sighting> out;
  const Path& own = world.paths[static_cast<std::size_t>(ego.path)];
  for (const Rollout& r : others) {
    if (r.id == ego.id) continue;
    const Path& theirs = world.paths[static_cast<std::size_t>(r.path)];
    for (int t = 0; t <= params.horizon; ++t) {
      if (!r.present(t)) break;
      const double pz = r.p[static_cast<std::size_t>(t)];
      std::optional<double> s;
      if (r.path == ego.path) {
        s = pz;
      } else {
        s = own.locate(theirs.to_global(pz), frontal_tolerance(params));
      }
      if (s && *s > ego.state.p) out.push_back({r.id, t, *s});
    }
  }
  return out;
}

double frontal_tolerance(const Params& params) { return params.min_distance * (1.0 - 1e-9); }

const char* to_string(RowTag::Kind k) {
  switch (k) {
    case RowTag::Kind::InputLow: return "input_low";
    case RowTag::Kind::InputHigh: return "input_high";
    case RowTag::Kind::SpeedLow: return "speed_low";
    case RowTag::Kind::SpeedHigh: return "speed_high";
    case RowTag::Kind::SlackLow: return "slack_low";
    case RowTag::Kind::SlackHigh: return "slack_high";
    case RowTag::Kind::Frontal: return "frontal";
    case RowTag::Kind::Crossing: return "crossing";
  }
  return "?";
}

int QpProblem::count(RowTag::Kind k) const {
  return static_cast<int>(std::count_if(tags.begin(), tags.end(),
                                        [k](const RowTag& t) { return t.kind == k; }));
}

namespace {

struct RowBuilder {
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  std::vector<RowTag> tags;

  void add(Eigen::VectorXd a, double b, RowTag tag) {
    rows.push_back(std::move(a));
    rhs.push_back(b);
    tags.push_back(tag);
  }
};

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

}  // namespace

QpProblem build_qp(const Agent& ego, const Neighbourhood& nb, const World& world,
                   const Params& params) {
  const int T = params.horizon;
  const int N = T + 1;
  const int n = 2 * N;
  const double ts = params.ts;
  const double v0 = ego.state.v;
  const double p0 = ego.state.p;
  const double vr = ego.params.v_ref;

  QpProblem out;
  out.horizon = T;
  out.ts = ts;
  out.x0 = ego.state;
  out.v_ref = vr;
  out.pos_map = Eigen::MatrixXd::Zero(N, N);
  out.speed_map = Eigen::MatrixXd::Zero(N, N);
  out.pos_free.resize(N);
  out.speed_free.resize(N);
  for (int t = 0; t < N; ++t) {
    for (int s = 0; s < t; ++s) out.speed_map(t, s) = ts;
    for (int s = 0; s <= t - 2; ++s) out.pos_map(t, s) = ts * ts * (t - 1 - s);
    out.pos_free(t) = p0 + t * ts * v0;
    out.speed_free(t) = v0;
  }
  const Eigen::MatrixXd& Sp = out.pos_map;
  const Eigen::MatrixXd& Sv = out.speed_map;

  qp::Problem& prob = out.problem;
  prob.P = Eigen::MatrixXd::Zero(n, n);
  prob.c = Eigen::VectorXd::Zero(n);
  prob.P.topLeftCorner(N, N) =
      2.0 * (params.q * Sv.transpose() * Sv + params.r * Eigen::MatrixXd::Identity(N, N));
  prob.c.head(N) = 2.0 * params.q * Sv.transpose() * Eigen::VectorXd::Constant(N, v0 - vr);
  prob.c.tail(N).setConstant(params.omega);
  prob.constant = params.q * N * (v0 - vr) * (v0 - vr);

  RowBuilder rb;
  auto unit = [n](int j, double val) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    a(j) = val;
    return a;
  };
  using K = RowTag::Kind;
  for (int t = 0; t < N; ++t) {
    rb.add(unit(t, 1.0), ego.params.a_min, {K::InputLow, t});
    rb.add(unit(t, -1.0), -ego.params.a_max, {K::InputHigh, t});
  }
  for (int t = 0; t < N; ++t) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    a.head(N) = Sv.row(t).transpose();
    rb.add(a, params.v_min - v0, {K::SpeedLow, t});
    rb.add(-a, v0 - params.v_max, {K::SpeedHigh, t});
  }
  for (int t = 0; t < N; ++t) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    a.head(N) = params.headway_relax * Sv.row(t).transpose();
    a(N + t) = 1.0;
    rb.add(a, -params.headway_relax * v0, {K::SlackLow, t});
    rb.add(unit(N + t, -1.0), -params.slack_max, {K::SlackHigh, t});
  }

  // gap(t) - p(t) >= lambda v(t) + d + delta(t)
  auto headway_row = [&](int t, double gap, RowTag tag) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    a.head(N) = -(Sp.row(t) + params.headway * Sv.row(t)).transpose();
    a(N + t) = -1.0;
    const double b = params.min_distance + params.headway * v0 + out.pos_free(t) - gap;
    if (t == 0) {
      // Satisfiable at t = 0 only if the slack can absorb the shortfall.
      const double best = params.headway_relax * v0;
      if (b > best + 1e-12) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "dropped_t0_row:%s:%d:shortfall=%.6g", to_string(tag.kind),
                      tag.other, b - best);
        out.warnings.emplace_back(buf);
        return;
      }
    }
    rb.add(std::move(a), b, tag);
  };

  std::vector<int> involved = nb.priority;
  for (int z : nb.frontal)
    if (!contains(involved, z)) involved.push_back(z);
  std::sort(involved.begin(), involved.end());
  involved.erase(std::remove(involved.begin(), involved.end(), ego.id), involved.end());

  std::vector<Rollout> rollouts;
  rollouts.reserve(involved.size());
  for (int z : involved) {
    const Agent& a = world.agent(z);
    rollouts.push_back(predict(a, world.paths[static_cast<std::size_t>(a.path)].length(), params));
  }
  const std::vector<Sighting> sightings = predicted_frontal(ego, rollouts, world, params);
  for (const Sighting& s : sightings) headway_row(s.t, s.s, {K::Frontal, s.t, s.id});

  auto sighted = [&](int id, int t) {
    return std::any_of(sightings.begin(), sightings.end(),
                       [&](const Sighting& s) { return s.id == id && s.t == t; });
  };

  if (world.registry) {
    const auto own_pending = pending_points(*world.registry, ego.path, p0);
    for (const Rollout& r : rollouts) {
      if (!contains(nb.priority, r.id) || contains(nb.frontal, r.id)) continue;
      // A point stays relevant until the other vehicle leaves its conflict zone.
      std::vector<CollisionPointRegistry::Hit> theirs;
      for (const auto& h : world.registry->along(r.path))
        if (h.s + std::max(h.after, params.min_distance) > r.p[0]) theirs.push_back(h);
      for (const auto& hi : own_pending) {
        auto hz = std::find_if(theirs.begin(), theirs.end(),
                               [&](const CollisionPointRegistry::Hit& h) { return h.point == hi.point; });
        if (hz == theirs.end()) continue;
        if (nb.precedence &&
            std::find(nb.precedence->begin(), nb.precedence->end(), std::pair{r.id, hi.point}) ==
                nb.precedence->end())
          continue;
        const double leave = hz->s + std::max(hz->after, params.min_distance);
        // Yield before the first conflict zone of the same intersection still ahead.
        double entry = hi.s - std::max(hi.before, params.min_distance);
        for (const auto& hj : own_pending) {
          if (hj.cluster < 0 || hj.cluster != hi.cluster || hj.s > hi.s) continue;
          const double e = hj.s - std::max(hj.before, params.min_distance);
          if (e > p0 && e < entry) entry = e;
        }
        const double stop = entry + params.min_distance;
        for (int t = 0; t < N; ++t) {
          if (sighted(r.id, t)) continue;
          if (!(r.p[static_cast<std::size_t>(t)] <= leave)) continue;
          headway_row(t, stop, {K::Crossing, t, r.id, hi.point});
        }
      }
    }
  }

  const auto m = static_cast<Eigen::Index>(rb.rows.size());
  prob.A.resize(m, n);
  prob.b.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    prob.A.row(i) = rb.rows[static_cast<std::size_t>(i)].transpose();
    prob.b(i) = rb.rhs[static_cast<std::size_t>(i)];
  }
  out.tags = std::move(rb.tags);
  return out;
}

double evaluate_cost(const QpProblem& qp, std::span<const double> u, std::span<const double> delta,
                     const Params& params) {
  const int N = qp.horizon + 1;
  if (static_cast<int>(u.size()) != N || static_cast<int>(delta.size()) != N)
    throw Error("trajectory length does not match the horizon");
  double cost = 0.0;
  double v = qp.x0.v;
  for (int t = 0; t < N; ++t) {
    const double ut = u[static_cast<std::size_t>(t)];
    cost += params.q * (v - qp.v_ref) * (v - qp.v_ref) + params.r * ut * ut +
            params.omega * delta[static_cast<std::size_t>(t)];
    v += qp.ts * ut;
  }
  return cost;
}

bool can_yield(VehicleState x0, double gap, double a_min, const Params& params) {
  double p = 0.0;
  double v = x0.v;
  for (int t = 0; t <= params.horizon; ++t) {
    if (gap - p < (params.headway - params.headway_relax) * v + params.min_distance - 1e-9) return false;
    const double u = std::max(a_min, -v / params.ts);
    p += params.ts * v;
    v = std::max(0.0, v + params.ts * u);
  }
  return true;
}

double max_violation(const QpProblem& qp, const Eigen::VectorXd& x) {
  if (qp.problem.constraints() == 0) return 0.0;
  return std::max(0.0, (qp.problem.b - qp.problem.A * x).maxCoeff());
}

Outcome control_step(const Agent& ego, const Neighbourhood& nb, const World& world,
                     const Params& params) {
  const QpProblem built = build_qp(ego, nb, world, params);
  Outcome out;
  out.rows = static_cast<int>(built.problem.constraints());
  out.frontal_rows = built.count(RowTag::Kind::Frontal);
  out.crossing_rows = built.count(RowTag::Kind::Crossing);
  for (const auto& w : built.warnings) out.events.push_back(w.substr(0, w.find(':')));

  const qp::Solution sol = qp::solve(built.problem);
  out.status = sol.status;
  if (sol.status == qp::Status::Optimal) {
    const int N = built.horizon + 1;
    out.feasible = true;
    out.u = sol.x(0);
    out.objective = sol.objective;
    out.kkt = qp::kkt_residuals(built.problem, sol.x, sol.multipliers).max();
    out.inputs.assign(sol.x.data(), sol.x.data() + N);
    out.slack.assign(sol.x.data() + N, sol.x.data() + 2 * N);
    return out;
  }
  out.u = std::max(ego.params.a_min, -ego.state.v / params.ts);
  out.events.emplace_back("infeasible_mpc");
  return out;
}

}  // namespace gridcross::mpc
