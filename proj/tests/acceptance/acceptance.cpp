// Acceptance suite: one [PASS]/[FAIL] line per criterion, exit status 1 if any fails.

#include "tmpmbm/experiment_io.hpp"
#include "tmpmbm/simulation.hpp"
#include "tmpmbm/validation.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>

#include <unistd.h>

namespace fs = std::filesystem;
using namespace tmpmbm;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const std::string& title, bool passed, const std::string& detail) {
    if (!passed) ++failures;
    std::cout << (passed ? "[PASS] " : "[FAIL] ") << id << ". " << title << ": " << detail << std::endl;
}

std::string seconds(double s) {
    std::ostringstream o;
    o.precision(3);
    o << std::fixed << s << " s";
    return o.str();
}

void suite(int id, const std::string& title, const SuiteResult& r, double time_limit) {
    const bool fast = r.seconds < time_limit;
    std::string detail = r.passed ? "oracle agreement" : r.detail;
    detail += ", " + seconds(r.seconds);
    if (!fast) detail += " exceeds " + seconds(time_limit);
    report(id, title, r.passed && fast, detail);
}

// ---- Desk-scale Scenario 1 ----

const CellSummary& find(const std::vector<CellSummary>& summary, FilterKind f, int window_length) {
    for (const auto& s : summary) {
        if (s.filter == f && s.cell.window_length == window_length) return s;
    }
    throw std::runtime_error("missing summary cell");
}

void desk_criteria() {
    ExperimentSpec spec = load_experiment(TMPMBM_DESK_CONFIG);
    spec.full_probs = {0.7};
    spec.clutter_rates = {10.0};
    spec.window_lengths = {5, 7, 10};
    spec.runs = 30;

    const auto start = Clock::now();
    const ExperimentResults res = run_monte_carlo(spec);
    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    if (!res.errors.empty()) {
        report(7, "Scenario 1 desk run", false, res.errors.front());
        report(8, "hypothesis counts", false, "desk run failed");
        return;
    }

    const double tm_pmbm = find(res.summary, FilterKind::TmPmbm, 7).rms.total;
    const double tm_pmb = find(res.summary, FilterKind::TmPmb, 7).rms.total;
    const double pmbm = find(res.summary, FilterKind::Pmbm, 7).rms.total;
    const double pmb = find(res.summary, FilterKind::Pmb, 7).rms.total;
    const double gap = std::abs(tm_pmb - tm_pmbm) / tm_pmbm;
    std::ostringstream d7;
    d7.precision(4);
    d7 << "RMS GOSPA tm-pmbm " << tm_pmbm << ", pmbm " << pmbm << ", tm-pmb " << tm_pmb << ", pmb " << pmb
       << ", tm-pmb/tm-pmbm gap " << 100.0 * gap << "%, " << seconds(elapsed) << " for N_w {5,7,10}";
    report(7, "Scenario 1 desk run (N_w=7, p_full=0.7, clutter 10, 30 runs)",
           tm_pmbm < pmbm && tm_pmb < pmb && gap <= 0.15 && elapsed < 600.0, d7.str());

    bool ok = true;
    std::ostringstream d8;
    d8.precision(4);
    for (int nw : {5, 7, 10}) {
        for (auto [tm, base] : {std::pair{FilterKind::TmPmbm, FilterKind::Pmbm}, std::pair{FilterKind::TmPmb, FilterKind::Pmb}}) {
            const auto& a = find(res.summary, tm, nw);
            const auto& b = find(res.summary, base, nw);
            const bool cell_ok = a.mean_local_hypotheses <= b.mean_local_hypotheses &&
                                 a.mean_global_hypotheses <= b.mean_global_hypotheses;
            ok = ok && cell_ok;
            d8 << (d8.tellp() > 0 ? "; " : "") << "N_w " << nw << ' ' << to_string(tm) << " (" << a.mean_local_hypotheses
               << ", " << a.mean_global_hypotheses << ") vs " << to_string(base) << " (" << b.mean_local_hypotheses
               << ", " << b.mean_global_hypotheses << ")" << (cell_ok ? "" : " VIOLATED");
        }
    }
    report(8, "hypothesis counts (mean local, mean global), TM <= baseline", ok, d8.str());
}

// ---- Determinism ----

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool run_cli(const fs::path& out, int threads) {
    const std::string cmd = std::string("\"") + TMPMBM_CLI_PATH + "\" run -c \"" + TMPMBM_DESK_CONFIG +
                            "\" --runs 4 --timing off --threads " + std::to_string(threads) + " -o \"" +
                            out.string() + "\" > /dev/null 2>&1";
    return std::system(cmd.c_str()) == 0;
}

void determinism() {
    const fs::path root = fs::temp_directory_path() / ("tmpmbm_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    const std::vector<std::pair<std::string, int>> runs{{"a", 4}, {"b", 4}, {"c", 1}};
    for (const auto& [name, threads] : runs) {
        if (!run_cli(root / name, threads)) {
            report(9, "determinism", false, "CLI run failed");
            fs::remove_all(root);
            return;
        }
    }
    bool same = true;
    std::string detail;
    std::size_t bytes = 0;
    for (const char* file : {"results.csv", "summary.csv", "hypotheses.csv", "timing.csv"}) {
        const std::string a = slurp(root / "a" / file);
        bytes += a.size();
        for (const char* other : {"b", "c"}) {
            if (a.empty() || a != slurp(root / other / file)) {
                same = false;
                detail += std::string(file) + " differs in run " + other + "; ";
            }
        }
    }
    fs::remove_all(root);
    if (same) detail = "three invocations (4, 4, 1 threads) produced identical CSVs, " + std::to_string(bytes) + " bytes";
    report(9, "determinism", same, detail);
}

}  // namespace

int main() {
    const ValidationOptions opt;
    suite(1, "Murty k-best vs exhaustive enumeration (200 matrices up to 4x4)", check_murty(200, 4, opt), 5.0);
    suite(2, "GOSPA vs brute-force matching (200 pairs up to 5 points)", check_gospa(200, 5, opt), 60.0);
    suite(3, "TM-PMBM vs stacked Kalman oracle (50 windows, 1e-9)", check_kalman(50, opt), 1.0);
    suite(4, "measurement density integrates to one (Monte Carlo, 1e-2)", check_density_integral(100000, opt), 60.0);
    suite(5, "recursion invariants (100 seeds x 20 windows)", check_recursion_invariants(100, 20, opt), 600.0);
    suite(6, "merge and marginalise commute (100 states, 1e-12)", check_order_swap(100, opt), 600.0);
    desk_criteria();
    determinism();
    return failures == 0 ? 0 : 1;
}
