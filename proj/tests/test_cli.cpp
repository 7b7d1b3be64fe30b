#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "regrid/cli.hpp"

namespace {

struct cli_result {
  int code;
  std::string out;
  std::string err;
};

cli_result run_cli(std::vector<std::string> args) {
  std::vector<const char*> argv = {"regrid"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = regrid::run_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

/// Writes `text` to a throwaway file which is removed on destruction.
struct temp_file {
  std::string path;
  explicit temp_file(const std::string& text) {
    static int counter = 0;
    path = "cli_test_" + std::to_string(counter++) + ".wl";
    std::ofstream(path) << text;
  }
  ~temp_file() { std::remove(path.c_str()); }
};

const char* kTinyWorkload = R"(
cluster 8
resizing on
job j
  arrival 0
  data none
  initial 1x2
  iterations 3
  ladder 1x2 2x2
  time 2 10
  time 4 6
end
)";

}  // namespace

TEST_CASE("schedule subcommand prints the destination table and cost") {
  cli_result r = run_cli({"schedule", "--src", "2", "--dst", "3", "--blocks", "12"});
  CHECK(r.code == 0);
  CHECK(r.out.find("2 steps, 8 blocks moved") != std::string::npos);
  CHECK(r.out.find("estimated cost:") != std::string::npos);
}

TEST_CASE("run subcommand replays a workload and reports metrics") {
  temp_file wl(kTinyWorkload);
  cli_result r = run_cli({"run", "-w", wl.path, "--seed", "7"});
  CHECK(r.code == 0);
  CHECK(r.out.find("# seed=7") != std::string::npos);
  CHECK(r.out.find("time,job_id,event,rows,cols,total_procs,detail") != std::string::npos);
  CHECK(r.out.find("utilization=") != std::string::npos);
}

TEST_CASE("run honors policy and resizing overrides") {
  temp_file wl(kTinyWorkload);
  cli_result r = run_cli({"run", "-w", wl.path, "--resizing", "off"});
  CHECK(r.code == 0);
  CHECK(r.out.find("decision") == std::string::npos);
  CHECK(r.out.find("resizing=off") != std::string::npos);
}

TEST_CASE("exit code 1 for usage and parse problems") {
  CHECK(run_cli({"schedule", "--dst", "3"}).code == 1);  // missing --src
  CHECK(run_cli({"run", "-w", "does_not_exist.wl"}).code == 1);
  temp_file bad("cluster oops\n");
  cli_result r = run_cli({"run", "-w", bad.path});
  CHECK(r.code == 1);
  CHECK(r.err.find("line 1") != std::string::npos);
}

TEST_CASE("exit code 2 when a job can never start") {
  temp_file wl("cluster 2\n"
               "job big\n iterations 1\n initial 2x2\n ladder 2x2\n time 4 1\nend\n");
  cli_result r = run_cli({"run", "-w", wl.path});
  CHECK(r.code == 2);
  CHECK(r.err.find("infeasible_workload") != std::string::npos);
}

TEST_CASE("exit code 3 when verification finds a violation") {
  cli_result ok = run_cli({"verify", "--max-procs", "4", "--max-blocks", "6"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("OK") != std::string::npos);

  cli_result bad = run_cli({"verify", "--max-procs", "4", "--max-blocks", "6",
                            "--inject-fault"});
  CHECK(bad.code == 3);
  CHECK(bad.out.find("injected fault detected") != std::string::npos);
}

TEST_CASE("help is success") {
  CHECK(run_cli({"--help"}).code == 0);
  CHECK(run_cli({}).code == 1);  // a subcommand is required
}
