#include "tmpmbm/pmbm.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace tmpmbm {

Gaussian LocalHypothesis::current_state() const {
    if (form == DensityForm::Trajectory) {
        const Eigen::Index n = state.mean.size() / 2;
        return marginal_block(state, n, n);
    }
    return state;
}

namespace {

void normalize_weights(std::vector<GlobalHypothesis>& globals) {
    double total = 0.0;
    for (const auto& g : globals) total += g.weight;
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw EmptyPosteriorError("global hypotheses have no positive weight");
    }
    for (auto& g : globals) g.weight /= total;
}

// Sums the weights of global hypotheses with identical assignments. Output is ordered
// lexicographically by assignment.
std::vector<GlobalHypothesis> merge_duplicates(std::vector<GlobalHypothesis> globals) {
    std::sort(globals.begin(), globals.end(),
              [](const auto& a, const auto& b) { return a.assignment < b.assignment; });
    std::vector<GlobalHypothesis> out;
    for (auto& g : globals) {
        if (!out.empty() && out.back().assignment == g.assignment) {
            out.back().weight += g.weight;
        } else {
            out.push_back(std::move(g));
        }
    }
    return out;
}

// Removes unreferenced local hypotheses and targets absent from every global.
void compact(PmbmState& state) {
    const std::size_t n = state.targets.size();
    std::vector<std::vector<int>> remap(n);
    std::vector<std::vector<LocalHypothesis>> kept_targets;
    std::vector<std::size_t> kept_index(n, 0);
    std::vector<bool> keep_target(n, false);

    for (std::size_t i = 0; i < n; ++i) {
        std::vector<bool> used(state.targets[i].size(), false);
        for (const auto& g : state.globals) {
            const int a = g.assignment[i];
            if (a != kAbsent) used[static_cast<std::size_t>(a)] = true;
        }
        remap[i].assign(state.targets[i].size(), kAbsent);
        std::vector<LocalHypothesis> hyps;
        for (std::size_t a = 0; a < used.size(); ++a) {
            if (!used[a]) continue;
            remap[i][a] = static_cast<int>(hyps.size());
            hyps.push_back(std::move(state.targets[i][a]));
        }
        if (!hyps.empty()) {
            keep_target[i] = true;
            kept_index[i] = kept_targets.size();
            kept_targets.push_back(std::move(hyps));
        }
    }
    for (auto& g : state.globals) {
        std::vector<int> assignment;
        assignment.reserve(kept_targets.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!keep_target[i]) continue;
            const int a = g.assignment[i];
            assignment.push_back(a == kAbsent ? kAbsent : remap[i][static_cast<std::size_t>(a)]);
        }
        g.assignment = std::move(assignment);
    }
    state.targets = std::move(kept_targets);
}

}  // namespace

PmbmState normalize_and_prune(PmbmState state, const PruneThresholds& thresholds) {
    std::erase_if(state.poisson,
                  [&](const PoissonComponent& c) { return c.weight < thresholds.poisson; });

    for (auto& g : state.globals) {
        if (g.assignment.size() != state.targets.size()) {
            throw std::invalid_argument("global hypothesis does not cover every target");
        }
        for (std::size_t i = 0; i < g.assignment.size(); ++i) {
            const int a = g.assignment[i];
            if (a == kAbsent) continue;
            if (a < 0 || static_cast<std::size_t>(a) >= state.targets[i].size()) {
                throw std::out_of_range("global hypothesis references a missing local hypothesis");
            }
            if (state.targets[i][static_cast<std::size_t>(a)].existence < thresholds.bernoulli) {
                g.assignment[i] = kAbsent;
            }
        }
    }

    auto globals = merge_duplicates(std::move(state.globals));
    normalize_weights(globals);
    std::erase_if(globals, [&](const GlobalHypothesis& g) { return g.weight < thresholds.global; });
    if (globals.empty()) throw EmptyPosteriorError("every global hypothesis was pruned");
    std::stable_sort(globals.begin(), globals.end(),
                     [](const auto& a, const auto& b) { return a.weight > b.weight; });
    if (globals.size() > thresholds.max_globals) globals.resize(thresholds.max_globals);
    normalize_weights(globals);
    state.globals = std::move(globals);

    compact(state);
    return state;
}

std::vector<Eigen::VectorXd> estimate(const PmbmState& state, double existence_threshold) {
    if (state.form != StateForm::Target) {
        throw std::logic_error("estimate requires a state over targets");
    }
    std::vector<Eigen::VectorXd> out;
    if (state.globals.empty()) return out;
    const auto best = std::max_element(
        state.globals.begin(), state.globals.end(),
        [](const auto& a, const auto& b) { return a.weight < b.weight; });
    for (std::size_t i = 0; i < best->assignment.size(); ++i) {
        const int a = best->assignment[i];
        if (a == kAbsent) continue;
        const auto& hyp = state.targets[i][static_cast<std::size_t>(a)];
        if (hyp.existence > existence_threshold) out.push_back(hyp.current_state().mean);
    }
    return out;
}

std::vector<double> marginal_hypothesis_weights(const PmbmState& state, std::size_t i) {
    std::vector<double> w(state.targets.at(i).size(), 0.0);
    for (const auto& g : state.globals) {
        const int a = g.assignment[i];
        if (a != kAbsent) w[static_cast<std::size_t>(a)] += g.weight;
    }
    return w;
}

PmbmState kld_merge_to_pmb(const PmbmState& state) {
    PmbmState out;
    out.form = state.form;
    out.poisson = state.poisson;
    out.globals = {GlobalHypothesis{1.0, {}}};

    for (std::size_t i = 0; i < state.targets.size(); ++i) {
        const auto& hyps = state.targets[i];
        const std::vector<double> wbar = marginal_hypothesis_weights(state, i);
        std::vector<double> mass(hyps.size());
        double existence = 0.0;
        for (std::size_t a = 0; a < hyps.size(); ++a) {
            mass[a] = wbar[a] * hyps[a].existence;
            existence += mass[a];
        }
        if (!(existence > 0.0)) continue;

        LocalHypothesis merged;
        merged.existence = std::min(1.0, existence);
        merged.form = hyps.front().form;
        if (merged.form != DensityForm::Trajectory) {
            std::vector<Gaussian> gs;
            for (const auto& h : hyps) gs.push_back(h.state);
            merged.state = moment_match(mass, gs);
        } else {
            std::array<std::vector<double>, 2> branch_mass;
            std::array<std::vector<Gaussian>, 2> branch_gauss;
            std::array<double, 2> branch_total{0.0, 0.0};
            for (std::size_t a = 0; a < hyps.size(); ++a) {
                for (std::size_t l = 0; l < 2; ++l) {
                    const double m = mass[a] * hyps[a].beta[l];
                    if (!(m > 0.0)) continue;
                    branch_mass[l].push_back(m);
                    branch_gauss[l].push_back(l == 0 ? hyps[a].died : hyps[a].state);
                    branch_total[l] += m;
                }
            }
            const double total = branch_total[0] + branch_total[1];
            merged.beta = {branch_total[0] / total, branch_total[1] / total};
            merged.died = branch_mass[0].empty() ? hyps.front().died
                                                 : moment_match(branch_mass[0], branch_gauss[0]);
            merged.state = branch_mass[1].empty() ? hyps.front().state
                                                  : moment_match(branch_mass[1], branch_gauss[1]);
        }
        out.targets.push_back({std::move(merged)});
        out.globals.front().assignment.push_back(0);
    }
    return out;
}

HypothesisCounts hypothesis_counts(const PmbmState& state) {
    HypothesisCounts c;
    for (const auto& t : state.targets) c.local += t.size();
    c.global = state.globals.size();
    return c;
}

std::string describe(const PmbmState& state) {
    std::ostringstream os;
    os << std::setprecision(6);
    os << "form: " << (state.form == StateForm::Target ? "target" : "trajectory") << '\n';
    double ppp_mass = 0.0;
    for (const auto& c : state.poisson) ppp_mass += c.weight;
    os << "poisson: components=" << state.poisson.size() << " mass=" << ppp_mass << '\n';
    os << "targets: " << state.targets.size() << '\n';
    for (std::size_t i = 0; i < state.targets.size(); ++i) {
        const auto wbar = marginal_hypothesis_weights(state, i);
        const auto best = std::max_element(wbar.begin(), wbar.end()) - wbar.begin();
        os << "  target " << i << ": hypotheses=" << state.targets[i].size();
        if (!state.targets[i].empty()) {
            os << " max_weight_r=" << state.targets[i][static_cast<std::size_t>(best)].existence;
        }
        os << '\n';
    }
    os << "globals: " << state.globals.size() << '\n';
    for (std::size_t a = 0; a < state.globals.size(); ++a) {
        os << "  global " << a << ": weight=" << state.globals[a].weight << " [";
        for (std::size_t i = 0; i < state.globals[a].assignment.size(); ++i) {
            if (i) os << ' ';
            const int idx = state.globals[a].assignment[i];
            if (idx == kAbsent) os << '-'; else os << idx;
        }
        os << "]\n";
    }
    return os.str();
}

}  // namespace tmpmbm
