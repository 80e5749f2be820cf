// End-to-end checks of the command-line tool. Spawns the real binary
// (path injected at build time) and inspects exit codes and artifacts.
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hoim/cnf.hpp"
#include "hoim/report.hpp"

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void check(bool ok, const std::string& what) {
    std::cout << (ok ? "  ok: " : "  FAILED: ") << what << '\n';
    if (!ok) ++g_failures;
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd =
        std::string(HOIM_CLI_PATH) + " " + args + " >" + log.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : 128 + WTERMSIG(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

size_t count_lines(const std::string& s) {
    size_t n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

int main() {
    const fs::path work = fs::current_path() / "cli_test_out";
    fs::remove_all(work);
    fs::create_directories(work);

    const fs::path easy = work / "easy.cnf";
    write_file(easy, "p cnf 3 3\n1 2 0\n-1 3 0\n-2 -3 1 0\n");
    const fs::path wide = work / "wide.cnf";
    write_file(wide, "p cnf 5 2\n1 2 3 4 5 0\n-1 -2 -3 0\n");
    const fs::path broken = work / "broken.cnf";
    write_file(broken, "p cnf 2 1\n1 5 0\n");

    std::cout << "solve exit codes and artifacts\n";
    {
        const fs::path out = work / "run1";
        const int rc = run_cli("solve " + easy.string() + " --trials 4 --seed 1 --integrator rk4" +
                                   " --step 0.02 --t-end 4 --out " + out.string() +
                                   " --trace " + (out / "trace.csv").string(),
                               work / "solve1.log");
        check(rc == 10, "solved instance exits 10");
        const std::string csv = slurp(out / "results.csv");
        check(count_lines(csv) == 5, "results.csv has header + 4 rows");
        check(csv.rfind("instance,order,exponent,trial,seed,", 0) == 0, "results.csv header");
        check(csv.find("easy,higher,1,0,1,") != std::string::npos, "first row seeded from 1");
        const hoim::json agg = hoim::json::parse(slurp(out / "aggregates.json"));
        check(agg.at("schema") == 1, "aggregates schema tag");
        check(agg.at("instances").size() == 1, "one instance aggregated");
        check(fs::exists(out / "aggregates.csv"), "aggregates.csv written");
        const hoim::json man = hoim::json::parse(slurp(out / "run_manifest.json"));
        check(man.at("inputs")[0].at("fnv1a64") == hoim::digest_file(easy.string()),
              "manifest digests the input");
        const std::string trace = slurp(out / "trace.csv");
        check(trace.rfind("t,", 0) == 0, "trace has a time column header");
        check(count_lines(trace) >= 3, "trace has samples");
    }
    {
        const int rc = run_cli("solve " + (work / "missing.cnf").string(), work / "solve2.log");
        check(rc == 2, "unreadable input exits 2");
        const int rc3 = run_cli("solve " + broken.string(), work / "solve3.log");
        check(rc3 == 3, "parse error exits 3");
        check(slurp(work / "solve3.log").find("exceeds declared variable count") !=
                  std::string::npos,
              "parse error names the offense");
        const int rc4 = run_cli("solve " + easy.string() + " --coupling -1 --trials 1",
                                work / "solve4.log");
        check(rc4 == 4, "invalid parameter exits 4");
        const int rc5 = run_cli("solve " + wide.string() + " --order second --trials 1 --out " +
                                    (work / "run_wide").string(),
                                work / "solve5.log");
        check(rc5 == 4, "second-order machine refuses clauses past 3 literals");
        check(slurp(work / "solve5.log").find("reduce") != std::string::npos,
              "refusal points at the reduce command");
    }

    std::cout << "reduce\n";
    {
        const fs::path red = work / "wide3.cnf";
        const int rc = run_cli("reduce " + wide.string() + " -o " + red.string(),
                               work / "reduce.log");
        check(rc == 0, "reduce exits 0");
        hoim::CnfFormula f = hoim::parse_dimacs_file(red.string());
        check(f.num_vars == 7, "5-literal clause adds two bridge variables");
        int wide_left = 0;
        for (const auto& c : f.clauses)
            if (c.literals.size() > 3) ++wide_left;
        check(wide_left == 0, "every output clause has at most 3 literals");
        const hoim::json map = hoim::json::parse(slurp(work / "wide3.cnf.map.json"));
        check(map.at("original_vars") == 5 && map.at("aux_vars") == 2, "variable map counts");

        const fs::path same = work / "easy3.cnf";
        const int rc2 = run_cli("reduce " + easy.string() + " -o " + same.string(),
                                work / "reduce2.log");
        check(rc2 == 0, "already-3SAT reduce exits 0");
        check(slurp(same) == hoim::write_dimacs(hoim::parse_dimacs_file(easy.string())),
              "already-3SAT input re-emitted canonically");
    }

    std::cout << "quadratize\n";
    {
        const fs::path model = work / "easy.quadratic.json";
        const fs::path triples = work / "easy.triples";
        const int rc = run_cli("quadratize " + easy.string() + " -o " + model.string() +
                                   " --triples " + triples.string(),
                               work / "quad.log");
        check(rc == 0, "quadratize exits 0");
        const hoim::json j = hoim::json::parse(slurp(model));
        check(j.at("spins") == 4, "one auxiliary spin for the lone 3-clause");
        check(j.at("couplings").is_array() && !j.at("couplings").empty(), "couplings listed");
        check(slurp(triples).find("# ising model:") == 0, "triples carry the offset header");
        const int rc2 = run_cli("quadratize " + wide.string() + " -o " + (work / "x.json").string(),
                                work / "quad2.log");
        check(rc2 == 4, "quadratize refuses clauses past 3 literals");
    }

    std::cout << "resources\n";
    {
        const fs::path out = work / "res.json";
        const int rc = run_cli("resources " + easy.string() + " --order both --scheme hub --out " +
                                   out.string(),
                               work / "res.log");
        check(rc == 0, "resources exits 0");
        const hoim::json j = hoim::json::parse(slurp(out));
        check(j.at("higher").at("spins") == 3, "higher order uses original spins");
        check(j.at("higher").at("connections") == 2 * 2 + 2 * 2 + 2 * 3,
              "hub wiring counts two links per clause member");
        check(j.at("second").at("spins") == 4, "second order pays auxiliary spins");
        check(j.contains("second_to_higher_ratio"), "ratio block present");
        const int rc2 = run_cli("resources " + wide.string() + " --order higher --scheme all-to-all",
                                work / "res2.log");
        check(rc2 == 0, "higher-order-only resources accept wide clauses");
    }

    std::cout << "sweep and config reuse\n";
    {
        const fs::path grid = work / "grid.json";
        write_file(grid, "{\"coupling\": [0.2, 0.5], \"q_max\": [1.0]}\n");
        const fs::path out = work / "sweep1";
        const int rc = run_cli("sweep " + easy.string() + " --grid " + grid.string() +
                                   " --trials 4 --integrator rk4 --step 0.02 --t-end 4 --out " +
                                   out.string(),
                               work / "sweep.log");
        check(rc == 0, "sweep exits 0");
        const std::string csv = slurp(out / "sweep.csv");
        check(count_lines(csv) == 3, "sweep.csv has header + one row per grid point");
        check(csv.rfind("rank,", 0) == 0, "sweep rows are ranked");
        const hoim::json best = hoim::json::parse(slurp(out / "best.json"));
        check(best.contains("coupling") && best.contains("metrics"), "best.json is a full config");

        const fs::path out2 = work / "run_from_best";
        const int rc2 = run_cli("solve " + easy.string() + " --config " +
                                    (out / "best.json").string() + " --out " + out2.string(),
                                work / "solve_best.log");
        check(rc2 == 0 || rc2 == 10, "best.json feeds back into solve");
        const hoim::json man = hoim::json::parse(slurp(out2 / "run_manifest.json"));
        check(man.at("config").at("coupling") == best.at("coupling"),
              "config round-trips through the sweep artifact");

        const fs::path badgrid = work / "badgrid.json";
        write_file(badgrid, "{\"volume\": [1]}\n");
        const int rc3 = run_cli("sweep " + easy.string() + " --grid " + badgrid.string(),
                                work / "sweep_bad.log");
        check(rc3 == 4, "unknown grid key exits 4");
    }

    std::cout << "rerun\n";
    {
        const fs::path out = work / "run_a";
        run_cli("solve " + easy.string() + " --trials 3 --seed 9 --integrator rk4 --step 0.02" +
                    " --t-end 4 --out " + out.string(),
                work / "rerun_a.log");
        const fs::path out2 = work / "run_b";
        const int rc = run_cli("rerun " + (out / "run_manifest.json").string() + " --out " +
                                   out2.string(),
                               work / "rerun_b.log");
        check(rc == 0 || rc == 10, "rerun exits cleanly");
        auto strip_wall = [](const std::string& csv) {
            std::istringstream in(csv);
            std::string line, outstr;
            while (std::getline(in, line)) {
                outstr += line.substr(0, line.rfind(','));  // wall_ms is timing noise
                outstr += '\n';
            }
            return outstr;
        };
        check(strip_wall(slurp(out / "results.csv")) == strip_wall(slurp(out2 / "results.csv")),
              "rerun reproduces every result column except wall time");

        write_file(easy, "p cnf 3 3\n1 2 0\n-1 3 0\n-2 -3 1 0\nc tampered\n");
        const int rc2 = run_cli("rerun " + (out / "run_manifest.json").string() + " --out " +
                                    (work / "run_c").string(),
                                work / "rerun_c.log");
        check(rc2 == 4, "digest mismatch exits 4");
        check(slurp(work / "rerun_c.log").find("digest") != std::string::npos,
              "digest mismatch is reported");
    }

    std::cout << (g_failures == 0 ? "all cli checks passed\n"
                                  : std::to_string(g_failures) + " cli checks failed\n");
    return g_failures == 0 ? 0 : 1;
}
