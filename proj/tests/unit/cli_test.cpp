#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "icepath/planner.hpp"

using namespace icepath;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "icepath-cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Run cli(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = std::string("\"") + ICEPATH_CLI + "\" " + args + " > \"" + out.string() + "\" 2> \"" +
                          err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

const char* kSmallRegion = "--region=-65,-60,-45,-35,0.5";

void write_waypoints(const fs::path& p) {
  std::ofstream(p) << "id,lat,lon\nA,-61.25,-43.75\nB,-61.25,-36.25\n";
}

}  // namespace

TEST_CASE("cli: fixed seed gives an identical dataset file") {
  const fs::path a = scratch("seed-a"), b = scratch("seed-b");
  REQUIRE(cli(std::string("synth ") + kSmallRegion + " --seed 7 --out " + a.string(), a).code == 0);
  REQUIRE(cli(std::string("synth ") + kSmallRegion + " --seed 7 --out " + b.string(), b).code == 0);
  const std::string x = slurp(a / "dataset-2017.csv");
  CHECK_FALSE(x.empty());
  CHECK(x == slurp(b / "dataset-2017.csv"));
}

TEST_CASE("cli: planning from a waypoint to itself") {
  const fs::path dir = scratch("self");
  write_waypoints(dir / "wps.csv");
  const std::string common = std::string(kSmallRegion) + " --out " + dir.string();
  REQUIRE(cli("synth " + common, dir).code == 0);
  REQUIRE(cli("mesh " + common, dir).code == 0);
  const Run r = cli("plan " + common + " --waypoints " + (dir / "wps.csv").string() + " --month 2 --start B --goal B",
                    dir);
  CHECK(r.code == 0);
  CHECK(r.out.find("B -> B") != std::string::npos);
  CHECK(fs::exists(dir / "route.geojson"));
}

TEST_CASE("cli: composing the wait-then-travel fixture") {
  const fs::path dir = scratch("compose");
  PathBook book;
  for (int m = 1; m <= 12; ++m) {
    book.accessibility.open[{"A", m}] = m <= 2;
    book.accessibility.open[{"B", m}] = m == 2;
  }
  Route r;
  r.source = "A";
  r.destination = "B";
  r.planning_month = 2;
  r.total_hours = 480.0;
  r.legs.push_back({{-60.0, -40.0}, {-60.5, -41.0}, 0.0, 480.0, 0});
  r.cells = {0};
  book.routes.emplace(PathBookKey{2, "A", "B"}, r);
  {
    std::ofstream f(dir / "pathbook.jsonl");
    write_pathbook(book, f, "{}");
  }
  const Run run = cli("compose --out " + dir.string() + " --start A --goal B --month 1", dir);
  REQUIRE(run.code == 0);
  const std::string cal = slurp(dir / "calendar.txt");
  CHECK(cal.rfind("# config ", 0) == 0);
  std::istringstream in(cal);
  int waits = 0, travel = 0;
  for (std::string line; std::getline(in, line);) {
    if (line.size() < 13 || line[3] != ' ') continue;
    waits += line[12] == '~';
    travel += line[12] == '#';
  }
  CHECK(waits == 31);
  CHECK(travel == 20);
  CHECK(fs::exists(dir / "journey.json"));
}

TEST_CASE("cli: report on an empty path-book") {
  const fs::path dir = scratch("empty");
  {
    std::ofstream f(dir / "pathbook.jsonl");
    write_pathbook(PathBook{}, f, "{}");
  }
  REQUIRE(cli("report --out " + dir.string(), dir).code == 0);
  std::istringstream in(slurp(dir / "routes.csv"));
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  REQUIRE(lines.size() == 2);
  CHECK(lines[1] == "month,source,destination,travel_days,legs");
  CHECK(slurp(dir / "metrics.csv").find("no-routes") != std::string::npos);
}

TEST_CASE("cli: errors are one line with a kind and an exit code") {
  const fs::path dir = scratch("errors");
  const Run missing = cli("compose --out " + dir.string() + " --start A --goal B", dir);
  CHECK(missing.code == 3);
  CHECK(missing.err.rfind("error: missing-artifact: ", 0) == 0);
  CHECK(std::count(missing.err.begin(), missing.err.end(), '\n') == 1);

  const Run usage = cli("plan --out " + dir.string() + " --month 13 --start A --goal B", dir);
  CHECK(usage.code == 2);
  CHECK(usage.err.rfind("error: usage: ", 0) == 0);

  std::ofstream(dir / "dataset-2017.csv") << "lat,lon,day,u,v,ice\n";
  const Run data = cli("mesh --out " + dir.string(), dir);
  CHECK(data.code == 4);
  CHECK(data.err.rfind("error: data: ", 0) == 0);

  const Run bad_flag = cli("synth --no-such-flag", dir);
  CHECK(bad_flag.code == 2);
}

TEST_CASE("cli: crossing table") {
  const fs::path dir = scratch("debug");
  const Run r = cli("crossing-debug --x 5000 --a 5000 --Y 0 --edge-lo -5000 --edge-hi 5000 --samples 5", dir);
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("y,t1,t2,total\n", 0) == 0);
  CHECK(r.out.find("# optimum y 0") != std::string::npos);
}
