#include "icepath/composer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <queue>
#include <set>
#include <tuple>

#include <json.hpp>

namespace icepath {

namespace {

using nlohmann::json;

std::size_t slot(std::uint32_t wp, int month) { return static_cast<std::size_t>(wp) * 12 + (month - 1); }

}  // namespace

const char* to_string(MetaEdgeKind k) {
  switch (k) {
    case MetaEdgeKind::travel_same_month: return "travel_same_month";
    case MetaEdgeKind::travel_next_month: return "travel_next_month";
    case MetaEdgeKind::wait: return "wait";
  }
  return "unknown";
}

YearGraph::YearGraph(std::vector<std::string> waypoints, std::vector<MetaEdge> edges)
    : waypoints_(std::move(waypoints)), edges_(std::move(edges)) {
  for (const auto& e : edges_) {
    if (e.from >= waypoints_.size() || e.to >= waypoints_.size()) throw std::invalid_argument("meta-edge endpoint");
    if (e.month < 1 || e.month > 12) throw std::invalid_argument("meta-edge month");
  }
  std::stable_sort(edges_.begin(), edges_.end(), [](const MetaEdge& a, const MetaEdge& b) {
    return std::tuple(a.from, a.month, static_cast<int>(a.kind), a.to) <
           std::tuple(b.from, b.month, static_cast<int>(b.kind), b.to);
  });
  offsets_.assign(waypoints_.size() * 12 + 1, 0);
  for (const auto& e : edges_) ++offsets_[slot(e.from, e.month) + 1];
  for (std::size_t i = 1; i < offsets_.size(); ++i) offsets_[i] += offsets_[i - 1];
}

std::optional<std::uint32_t> YearGraph::index_of(const std::string& id) const {
  const auto it = std::lower_bound(waypoints_.begin(), waypoints_.end(), id);
  if (it == waypoints_.end() || *it != id) return std::nullopt;
  return static_cast<std::uint32_t>(it - waypoints_.begin());
}

std::span<const MetaEdge> YearGraph::out(std::uint32_t wp, int month) const {
  const std::size_t s = slot(wp, month);
  return std::span<const MetaEdge>(edges_).subspan(offsets_[s], offsets_[s + 1] - offsets_[s]);
}

YearGraph build_year_graph(const PathBook& pathbook, const Accessibility& accessibility) {
  std::set<std::string> ids;
  for (const auto& [key, open] : accessibility.open) ids.insert(key.first);
  for (const auto& [key, route] : pathbook.routes) {
    ids.insert(key.source);
    ids.insert(key.destination);
  }
  std::vector<std::string> waypoints(ids.begin(), ids.end());
  auto index = [&](const std::string& id) {
    return static_cast<std::uint32_t>(std::lower_bound(waypoints.begin(), waypoints.end(), id) - waypoints.begin());
  };

  std::vector<MetaEdge> edges;
  for (const auto& [key, route] : pathbook.routes) {
    const double days = route.total_days();
    if (days > kMaxEdgeDays) continue;
    const std::uint32_t a = index(key.source);
    const std::uint32_t b = index(key.destination);
    edges.push_back({MetaEdgeKind::travel_same_month, a, b, key.month, days, &route});
    edges.push_back({MetaEdgeKind::travel_next_month, a, b, key.month, days, &route});
  }
  for (std::uint32_t w = 0; w < waypoints.size(); ++w)
    for (int m = 1; m <= 12; ++m)
      if (accessibility.is_open(waypoints[w], m) && accessibility.is_open(waypoints[w], wrap_month(m + 1)))
        edges.push_back({MetaEdgeKind::wait, w, w, m, static_cast<double>(month_length(m)), nullptr});
  return YearGraph(std::move(waypoints), std::move(edges));
}

int ComposedJourney::wait_blocks() const {
  int blocks = 0;
  bool in_wait = false;
  for (const auto& s : steps) {
    const bool w = s.kind == MetaEdgeKind::wait;
    if (w && !in_wait) ++blocks;
    in_wait = w;
  }
  return blocks;
}

std::optional<ComposedJourney> compose_from(const std::string& init, const std::string& goal, const YearGraph& graph,
                                            int start_month) {
  if (start_month < 1 || start_month > 12) throw std::invalid_argument("start month out of range");
  const auto src = graph.index_of(init);
  const auto dst = graph.index_of(goal);
  if (!src || !dst) return std::nullopt;

  std::array<double, kHorizonMonths + 1> begin{};
  for (int k = 0; k < kHorizonMonths; ++k) begin[k + 1] = begin[k] + month_length(wrap_month(start_month + k));

  const std::size_t n = graph.waypoints().size() * kHorizonMonths;
  auto node = [](std::uint32_t wp, int k) { return static_cast<std::size_t>(wp) * kHorizonMonths + k; };
  constexpr double kInf = 1e300;
  std::vector<double> label(n, kInf);
  std::vector<std::size_t> parent(n, n);
  std::vector<const MetaEdge*> via(n, nullptr);
  std::vector<bool> settled(n, false);

  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  const std::size_t start = node(*src, 0);
  label[start] = 0.0;
  queue.push({0.0, start});
  std::optional<std::size_t> reached;
  while (!queue.empty()) {
    const auto [tau, at] = queue.top();
    queue.pop();
    if (settled[at]) continue;
    settled[at] = true;
    const auto wp = static_cast<std::uint32_t>(at / kHorizonMonths);
    const int k = static_cast<int>(at % kHorizonMonths);
    if (wp == *dst) {
      reached = at;
      break;
    }
    auto relax = [&](std::size_t next, double t, const MetaEdge* e) {
      if (!settled[next] && t < label[next]) {
        label[next] = t;
        parent[next] = at;
        via[next] = e;
        queue.push({t, next});
      }
    };
    for (const auto& e : graph.out(wp, wrap_month(start_month + k))) {
      switch (e.kind) {
        case MetaEdgeKind::travel_same_month: {
          const double t = tau + e.duration_days;
          if (t <= begin[k + 1]) relax(node(e.to, k), t, &e);
          break;
        }
        case MetaEdgeKind::travel_next_month: {
          const double t = tau + e.duration_days;
          if (k + 1 < kHorizonMonths && t > begin[k + 1] && t <= begin[k + 2]) relax(node(e.to, k + 1), t, &e);
          break;
        }
        case MetaEdgeKind::wait:
          if (k + 1 < kHorizonMonths) relax(node(wp, k + 1), std::max(tau, begin[k + 1]), &e);
          break;
      }
    }
  }
  if (!reached) return std::nullopt;

  ComposedJourney j;
  j.source = init;
  j.goal = goal;
  j.start_month = start_month;
  j.total_days = label[*reached];
  for (std::size_t at = *reached; at != start; at = parent[at]) {
    const MetaEdge& e = *via[at];
    JourneyStep s;
    s.kind = e.kind;
    s.from = graph.waypoints()[e.from];
    s.to = graph.waypoints()[e.to];
    s.month = e.month;
    s.start_day = label[parent[at]];
    s.end_day = label[at];
    s.route = e.route;
    j.steps.push_back(s);
  }
  std::reverse(j.steps.begin(), j.steps.end());
  for (const auto& s : j.steps) {
    if (s.kind == MetaEdgeKind::wait)
      ++j.waiting_months;
    else
      j.travel_days += s.end_day - s.start_day;
  }
  return j;
}

std::optional<ComposedJourney> compose(const std::string& init, const std::string& goal, const YearGraph& graph) {
  std::optional<ComposedJourney> best;
  for (int m = 1; m <= 12; ++m) {
    auto j = compose_from(init, goal, graph, m);
    if (j && (!best || j->total_days < best->total_days)) best = std::move(j);
  }
  return best;
}

std::string render_calendar(const ComposedJourney& journey) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "Journey  %s -> %s\n", journey.source.c_str(), journey.goal.c_str());
  out += buf;
  std::snprintf(buf, sizeof buf, "Start    %s\n", month_name(journey.start_month));
  out += buf;
  std::snprintf(buf, sizeof buf, "Travel   %.2f days\n", journey.travel_days);
  out += buf;
  std::snprintf(buf, sizeof buf, "Waiting  %d months\n", journey.waiting_months);
  out += buf;
  std::snprintf(buf, sizeof buf, "Total    %.2f days\n", journey.total_days);
  out += buf;

  const int lines = static_cast<int>(std::ceil(journey.total_days));
  if (lines <= 0) return out;
  out += "\n";

  std::vector<std::vector<std::string>> names(lines + 1);
  auto note = [&](int line, const std::string& id) {
    line = std::clamp(line, 1, lines);
    auto& v = names[line];
    if (std::find(v.begin(), v.end(), id) == v.end()) v.push_back(id);
  };
  for (const auto& s : journey.steps) {
    note(static_cast<int>(std::floor(s.start_day)) + 1, s.from);
    if (s.kind != MetaEdgeKind::wait) note(static_cast<int>(std::ceil(s.end_day)), s.to);
  }

  const int first_doy = month_first_day(journey.start_month);
  for (int d = 1; d <= lines; ++d) {
    const double lo = d - 1;
    const double hi = d;
    char mark = ' ';
    for (const auto& s : journey.steps) {
      if (std::min(hi, s.end_day) - std::max(lo, s.start_day) <= 0.0) continue;
      if (s.kind != MetaEdgeKind::wait) {
        mark = '#';
        break;
      }
      mark = '~';
    }
    const int doy = (first_doy - 1 + d - 1) % kDaysPerYear + 1;
    const int month = month_of_day(doy);
    const int dom = doy - month_first_day(month) + 1;
    const char* label = (d == 1 || dom == 1) ? month_abbrev(month) : "";
    std::string right;
    for (const auto& id : names[d]) {
      if (!right.empty()) right += ", ";
      right += id;
    }
    std::snprintf(buf, sizeof buf, "%-3s %2d %4d %c", label, dom, d, mark);
    std::string line = buf;
    if (!right.empty()) line += "  " + right;
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line;
    out += '\n';
  }
  return out;
}

std::string journey_record_json(const std::string& init, const std::string& goal,
                                const std::optional<ComposedJourney>& journey, const std::string& year) {
  json rec = {{"route", init + " -> " + goal}, {"year", year}};
  if (!journey) {
    rec["starting"] = "-";
    rec["waiting"] = "-";
    rec["duration"] = "-";
    return rec.dump();
  }
  json steps = json::array();
  for (const auto& s : journey->steps)
    steps.push_back({{"kind", to_string(s.kind)},
                     {"from", s.from},
                     {"to", s.to},
                     {"month", s.month},
                     {"start_day", s.start_day},
                     {"end_day", s.end_day}});
  rec["starting"] = month_name(journey->start_month);
  rec["waiting"] = journey->waiting_months;
  rec["duration"] = journey->total_days;
  rec["travel_days"] = journey->travel_days;
  rec["steps"] = std::move(steps);
  return rec.dump();
}

void write_journey_geojson(const ComposedJourney& journey, std::ostream& out, const std::string& config_json) {
  json features = json::array();
  for (std::size_t k = 0; k < journey.steps.size(); ++k) {
    const auto& s = journey.steps[k];
    json props = {{"step", k},
                  {"kind", to_string(s.kind)},
                  {"from", s.from},
                  {"to", s.to},
                  {"month", s.month},
                  {"start_day", s.start_day},
                  {"end_day", s.end_day}};
    if (s.kind == MetaEdgeKind::wait) {
      // Position taken from a neighbouring travel step.
      std::optional<LatLon> at;
      for (std::size_t i = k; i-- > 0 && !at;)
        if (journey.steps[i].route && !journey.steps[i].route->legs.empty())
          at = journey.steps[i].route->legs.back().to_point;
      for (std::size_t i = k + 1; i < journey.steps.size() && !at; ++i)
        if (journey.steps[i].route && !journey.steps[i].route->legs.empty())
          at = journey.steps[i].route->legs.front().from_point;
      json geometry = nullptr;
      if (at) geometry = {{"type", "Point"}, {"coordinates", {at->lon, at->lat}}};
      features.push_back({{"type", "Feature"}, {"geometry", geometry}, {"properties", props}});
      continue;
    }
    json coords = json::array();
    if (s.route && !s.route->legs.empty()) {
      coords.push_back({s.route->legs.front().from_point.lon, s.route->legs.front().from_point.lat});
      for (const auto& leg : s.route->legs) coords.push_back({leg.to_point.lon, leg.to_point.lat});
    }
    features.push_back(
        {{"type", "Feature"}, {"geometry", {{"type", "LineString"}, {"coordinates", coords}}}, {"properties", props}});
  }
  json fc = {{"type", "FeatureCollection"},
             {"config", json::parse(config_json)},
             {"properties",
              {{"source", journey.source},
               {"goal", journey.goal},
               {"start_month", journey.start_month},
               {"waiting_months", journey.waiting_months},
               {"total_days", journey.total_days}}},
             {"features", features}};
  out << fc.dump() << '\n';
}

}  // namespace icepath
