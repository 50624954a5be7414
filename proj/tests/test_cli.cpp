#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "hpforge/io.hpp"

using namespace hpforge;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = HPFORGE_FIXTURES_DIR;
const std::string kCli = HPFORGE_CLI_PATH;

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

fs::path scratch_root() {
    const auto root =
        fs::temp_directory_path() / ("hpforge-cli-" + std::to_string(::getpid()));
    fs::create_directories(root);
    return root;
}

// Runs the CLI through the shell, capturing exit code, stdout and stderr.
// `prefix` goes in front of the binary (environment assignments, timeout...).
RunResult run_cli(const std::string& args, const std::string& prefix = "") {
    static int counter = 0;
    const auto root = scratch_root();
    const auto out_file = root / ("out-" + std::to_string(counter));
    const auto err_file = root / ("err-" + std::to_string(counter));
    ++counter;

    std::string command;
    if (!prefix.empty()) command += prefix + " ";
    command += "\"" + kCli + "\" " + args;
    command += " >" + out_file.string() + " 2>" + err_file.string();
    const int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = read_text_file(out_file);
    result.err = read_text_file(err_file);
    return result;
}

std::string q(const fs::path& path) { return "\"" + path.string() + "\""; }

bool contains(const std::string& text, const std::string& needle) {
    return text.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("--version prints the tool version and exits cleanly") {
    const auto result = run_cli("--version");
    CHECK(result.exit_code == 0);
    CHECK(result.out == "hpforge 1.0.0\n");
}

TEST_CASE("a missing subcommand is a usage error") {
    const auto result = run_cli("");
    CHECK(result.exit_code == 64);
}

TEST_CASE("import ingests scanner XML and reports the host count") {
    const auto root = scratch_root();
    const auto out = root / "import-inventory.json";
    const auto result =
        run_cli("import --nmap-xml " + q(kFixtures / "lab31.xml") + " -o " + q(out));
    CHECK(result.exit_code == 0);
    CHECK(result.out == "31 hosts imported\n");
    CHECK(result.err == "");
    CHECK(fs::exists(out));
}

TEST_CASE("import rejects malformed XML with a data error") {
    const auto root = scratch_root();
    const auto broken = root / "broken.xml";
    write_text_file(broken, "<nmaprun><host></nmaprun>");
    const auto result =
        run_cli("import --nmap-xml " + q(broken) + " -o " + q(root / "ignored.json"));
    CHECK(result.exit_code == 2);
    CHECK(result.err.rfind("error: ", 0) == 0);
}

TEST_CASE("import refuses more than one input source") {
    const auto root = scratch_root();
    const auto result = run_cli("import --nmap-xml " + q(kFixtures / "lab31.xml") +
                                " --inventory " + q(kFixtures / "lab31_inventory.json") +
                                " -o " + q(root / "ignored.json"));
    CHECK(result.exit_code == 64);
    CHECK(result.err == "error: choose exactly one input: --nmap-xml, --inventory or --scan\n");
}

TEST_CASE("import without an output path is a usage error") {
    const auto result = run_cli("import --nmap-xml " + q(kFixtures / "lab31.xml"));
    CHECK(result.exit_code == 64);
}

TEST_CASE("cluster prints the chosen k and logs the variance trace to stderr") {
    const auto root = scratch_root();
    const auto out = root / "cluster-report.json";
    const auto result = run_cli("cluster --inventory " +
                                q(kFixtures / "planted5_inventory.json") + " -o " + q(out));
    CHECK(result.exit_code == 0);
    CHECK(result.out == "k=5\n");
    CHECK(contains(result.err, "sigma(k=1) = "));
    CHECK(fs::exists(out));
}

TEST_CASE("cluster runs are byte-identical for the same seed") {
    const auto root = scratch_root();
    const auto a = root / "cluster-a.json";
    const auto b = root / "cluster-b.json";
    const auto inventory = q(kFixtures / "planted5_inventory.json");
    CHECK(run_cli("cluster --inventory " + inventory + " --seed 7 -o " + q(a)).exit_code == 0);
    CHECK(run_cli("cluster --inventory " + inventory + " --seed 7 -o " + q(b)).exit_code == 0);
    CHECK(read_text_file(a) == read_text_file(b));
}

TEST_CASE("cluster rejects a non-positive evaluation count before touching input") {
    const auto result = run_cli("cluster --inventory nope.json --evaluations 0 -o out.json");
    CHECK(result.exit_code == 64);
}

TEST_CASE("plan prints the pick sequence and per-honeypot summary") {
    const auto root = scratch_root();
    const auto out = root / "plan.json";
    const auto result = run_cli("plan --inventory " + q(kFixtures / "lab31_inventory.json") +
                                " --clustering " + q(kFixtures / "lab31_clustering.json") +
                                " -n 3 -o " + q(out));
    CHECK(result.exit_code == 0);
    CHECK(result.out.rfind("deployment plan: 3 honeypots from 5 clusters (seed 0)\n", 0) == 0);
    CHECK(contains(result.out, "picks: 1 2 1\n"));
    CHECK(contains(result.out, "hp0: cluster 1 (12 hosts), template 192.168.1.20\n"));
    CHECK(read_text_file(out) == read_text_file(kFixtures / "lab31_plan.json"));
}

TEST_CASE("plan rejects a non-positive honeypot count") {
    const auto result = run_cli("plan --inventory a --clustering b -n 0 -o c");
    CHECK(result.exit_code == 64);
}

TEST_CASE("emit reproduces the golden honeyd configuration") {
    const auto root = scratch_root();
    const auto out = root / "honeyd.conf";
    const auto result =
        run_cli("emit --plan " + q(kFixtures / "lab31_plan.json") + " -o " + q(out));
    CHECK(result.exit_code == 0);
    CHECK(result.err == "wrote 26 lines of honeyd configuration\n");
    CHECK(read_text_file(out) == read_text_file(kFixtures / "golden_honeyd.conf"));
}

TEST_CASE("emit with an empty personality map matches emitting without one") {
    const auto root = scratch_root();
    const auto map_file = root / "empty.tsv";
    write_text_file(map_file, "# nothing mapped\n");
    const auto out = root / "honeyd-mapped.conf";
    const auto result = run_cli("emit --plan " + q(kFixtures / "lab31_plan.json") +
                                " --personality-map " + q(map_file) + " -o " + q(out));
    CHECK(result.exit_code == 0);
    CHECK(read_text_file(out) == read_text_file(kFixtures / "golden_honeyd.conf"));
}

TEST_CASE("emit applies personality map relabels") {
    const auto root = scratch_root();
    const auto map_file = root / "map.tsv";
    write_text_file(map_file, "Linux 4.9\tLinux 2.6.20-1 (Fedora Core 5)\n");
    const auto out = root / "honeyd-relabel.conf";
    const auto result = run_cli("emit --plan " + q(kFixtures / "lab31_plan.json") +
                                " --personality-map " + q(map_file) + " -o " + q(out));
    CHECK(result.exit_code == 0);
    const auto text = read_text_file(out);
    CHECK(contains(text, "set hp0 personality \"Linux 2.6.20-1 (Fedora Core 5)\"\n"));
    CHECK(contains(text, "set hp2 personality \"Linux 2.6.20-1 (Fedora Core 5)\"\n"));
    CHECK(contains(text, "set hp1 personality \"Microsoft Windows 10 1703\"\n"));
    CHECK(!contains(text, "personality \"Linux 4.9\""));
}

TEST_CASE("emit reports a missing plan as a data error") {
    const auto result = run_cli("emit --plan /nonexistent/plan.json -o out.conf");
    CHECK(result.exit_code == 2);
    CHECK(result.err.rfind("error: ", 0) == 0);
}

TEST_CASE("eval sweep writes one row per k") {
    const auto root = scratch_root();
    const auto out = root / "sweep.csv";
    const auto result = run_cli(
        "eval --experiment sweep --true-k 4 --hosts-per-cluster 5 --k-lo 1 --k-hi 8 -o " +
        q(out));
    CHECK(result.exit_code == 0);
    CHECK(result.err == "wrote 8 rows to " + out.string() + "\n");
    const auto csv = read_text_file(out);
    CHECK(csv.rfind("k,sigma\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
}

TEST_CASE("eval convergence writes one row per evaluation count") {
    const auto root = scratch_root();
    const auto out = root / "convergence.csv";
    const auto result = run_cli(
        "eval --experiment convergence --true-k 3 --hosts-per-cluster 4 --count-lo 1 "
        "--count-hi 5 -o " +
        q(out));
    CHECK(result.exit_code == 0);
    const auto csv = read_text_file(out);
    CHECK(csv.rfind("n_evaluations,chosen_k\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}

TEST_CASE("eval recovery tallies chosen k per mutation rate") {
    const auto root = scratch_root();
    const auto out = root / "recovery.csv";
    const auto result = run_cli(
        "eval --experiment recovery --true-k 3 --hosts-per-cluster 4 --trials 2 "
        "--betas 0,0.1 -o " +
        q(out));
    CHECK(result.exit_code == 0);
    const auto csv = read_text_file(out);
    CHECK(csv.rfind("beta,chosen_k,count\n", 0) == 0);
    // Two trials per beta: the counts in each beta's rows add up to 2.
    int total = 0;
    std::size_t pos = csv.find('\n') + 1;
    while (pos < csv.size()) {
        const auto end = csv.find('\n', pos);
        const auto line = csv.substr(pos, end - pos);
        total += std::stoi(line.substr(line.rfind(',') + 1));
        pos = end + 1;
    }
    CHECK(total == 4);
}

TEST_CASE("eval rejects unknown experiments and inverted ranges") {
    CHECK(run_cli("eval --experiment bogus -o out.csv").exit_code == 64);
    const auto inverted = run_cli("eval --experiment sweep --k-lo 3 --k-hi 2 -o out.csv");
    CHECK(inverted.exit_code == 64);
    CHECK(inverted.err == "error: --k-lo/--k-hi must satisfy 1 <= k-lo <= k-hi\n");
}

TEST_CASE("maintain enforces the one-minute interval floor") {
    const auto result = run_cli("maintain --nmap-xml " + q(kFixtures / "lab31.xml") +
                                " --out-dir out --interval 30s");
    CHECK(result.exit_code == 64);
    CHECK(result.err == "error: --interval must be at least one minute\n");
}

TEST_CASE("maintain rejects a non-positive cycle count") {
    const auto result = run_cli("maintain --nmap-xml " + q(kFixtures / "lab31.xml") +
                                " --out-dir out --cycles 0");
    CHECK(result.exit_code == 64);
}

TEST_CASE("maintain runs a bounded number of cycles and writes artifacts") {
    const auto root = scratch_root();
    const auto out_dir = root / "maintain-out";
    const auto result = run_cli("maintain --nmap-xml " + q(kFixtures / "lab31.xml") +
                                " --out-dir " + q(out_dir) + " --cycles 1 -n 3");
    CHECK(result.exit_code == 0);
    CHECK(contains(result.err, "cycle 1: 3 honeypots (k=5) -> plan-0001-"));
    CHECK(fs::exists(out_dir / "inventory.json"));
    CHECK(fs::exists(out_dir / "clustering.json"));
    CHECK(read_text_file(out_dir / "honeyd.conf") ==
          read_text_file(kFixtures / "golden_honeyd.conf"));
    int plan_files = 0;
    for (const auto& entry : fs::directory_iterator(out_dir))
        if (entry.path().filename().string().rfind("plan-", 0) == 0) ++plan_files;
    CHECK(plan_files == 1);
}

TEST_CASE("maintain winds down cleanly on SIGINT") {
    const auto root = scratch_root();
    const auto out_dir = root / "maintain-int";
    const auto result = run_cli("maintain --nmap-xml " + q(kFixtures / "lab31.xml") +
                                    " --out-dir " + q(out_dir) + " --interval 1m",
                                "timeout --preserve-status -s INT 2");
    CHECK(result.exit_code == 0);
    CHECK(contains(result.err, "cycle 1: "));
    CHECK(contains(result.err, "interrupted; exiting"));
}

TEST_CASE("HPFORGE_SEED supplies the default seed and --seed overrides it") {
    const auto root = scratch_root();
    const auto inventory = q(kFixtures / "planted5_inventory.json");
    const auto env_report = root / "seed-env.json";
    const auto flag_report = root / "seed-flag.json";
    const auto override_report = root / "seed-override.json";

    CHECK(run_cli("cluster --inventory " + inventory + " -o " + q(env_report),
                  "HPFORGE_SEED=123").exit_code == 0);
    CHECK(run_cli("cluster --inventory " + inventory + " --seed 123 -o " + q(flag_report))
              .exit_code == 0);
    CHECK(read_text_file(env_report) == read_text_file(flag_report));

    CHECK(run_cli("cluster --inventory " + inventory + " --seed 123 -o " + q(override_report),
                  "HPFORGE_SEED=999").exit_code == 0);
    CHECK(read_text_file(override_report) == read_text_file(flag_report));
}

TEST_CASE("a malformed HPFORGE_SEED is a usage error") {
    const auto result = run_cli("cluster --inventory " +
                                    q(kFixtures / "planted5_inventory.json") + " -o out.json",
                                "HPFORGE_SEED=abc");
    CHECK(result.exit_code == 64);
    CHECK(result.err == "error: HPFORGE_SEED must be a non-negative integer, got \"abc\"\n");
}
