#include "beamflutter/errors.hpp"
#include "beamflutter/scenario.hpp"

#include <algorithm>
#include <array>

namespace beamflutter {

namespace {

struct Preset {
    std::string_view name;
    std::string_view document;
};

constexpr std::array kPresets{
    Preset{"fig1-sweep", R"json({
  "name": "fig1-sweep",
  "description": "U_crit against L for C, H and CF; D = 23.9, beta = 1.2e-4, b1 = b2 = 0",
  "params": {"D": 23.9, "beta": 1.2e-4, "k0": 0},
  "sweep": {"axis": "l", "range": {"from": 100, "to": 500, "count": 41},
            "configs": ["C", "H", "CF"], "u_range": [0, 1000], "tol": 1e-6, "modes": 6},
  "outputs": ["report"]
})json"},
    Preset{"fig2-beta-sweep", R"json({
  "name": "fig2-beta-sweep",
  "description": "U_crit against beta for C, H and CF; L = 300, D = 23.9, k0 = 0",
  "notes": ["The caption of this figure repeats the k0-sweep caption; the beta axis and range [1e-5, 1e-2] follow the body text."],
  "params": {"D": 23.9, "L": 300, "k0": 0},
  "sweep": {"axis": "beta", "range": {"from": 1e-5, "to": 1e-2, "count": 31, "spacing": "log"},
            "configs": ["C", "H", "CF"], "u_range": [0, 1000], "tol": 1e-6, "modes": 6},
  "outputs": ["report"]
})json"},
    Preset{"fig3-k0-sweep", R"json({
  "name": "fig3-k0-sweep",
  "description": "U_crit against k0 for C, H and CF; L = 300, D = 23.9, beta = 1.2e-4",
  "notes": ["The k0 range is not stated; [0, 0.05] is used."],
  "params": {"D": 23.9, "L": 300, "beta": 1.2e-4},
  "sweep": {"axis": "k0", "range": {"from": 0, "to": 0.05, "count": 51},
            "configs": ["C", "H", "CF"], "u_range": [0, 1000], "tol": 1e-6, "modes": 6},
  "outputs": ["report"]
})json"},
    Preset{"fig4-ic-battery", R"json({
  "name": "fig4-ic-battery",
  "description": "Hinged panel energy growth from four initial states; U = 5, k0 = 0, beta = 1.2e-4, L = 300, D = 23.9",
  "config": "H",
  "params": {"D": 23.9, "L": 300, "beta": 1.2e-4, "U": 5, "k0": 0},
  "initial_data": [{"kind": "mode", "n": 1}, {"kind": "mode", "n": 2},
                   {"kind": "polynomial"}, {"kind": "elementary", "scale": 1}],
  "horizon": 20000,
  "analysis": "growth"
})json"},
    Preset{"lin-energy-C", R"json({
  "name": "lin-energy-C",
  "description": "Clamped linear energies for U at multiples of the quoted U_crit; k = 0 (U_crit 135.18) and k = 1 (U_crit 135.9)",
  "notes": ["The quoted U_crit values 135.18 and 135.9 are reproduced by the modal method only for CF; the clamped beam's own U_crit is about 636.7, so every run here is subcritical.",
            "The multiples of U_crit are not stated; 0, 0.5, 0.9, 1.1 and 1.5 are used."],
  "config": "C",
  "params": {"D": 1, "L": 1, "beta": 1, "b1": 0, "b2": 0},
  "initial_data": {"kind": "polynomial"},
  "horizon": 5,
  "runs": [
    {"label": "k=0_U=0",      "group": "k=0", "params": {"k0": -1, "U": 0}},
    {"label": "k=0_U=0.5Uc",  "group": "k=0", "params": {"k0": -1, "U": 67.59}},
    {"label": "k=0_U=0.9Uc",  "group": "k=0", "params": {"k0": -1, "U": 121.662}},
    {"label": "k=0_U=1.1Uc",  "group": "k=0", "params": {"k0": -1, "U": 148.698}},
    {"label": "k=0_U=1.5Uc",  "group": "k=0", "params": {"k0": -1, "U": 202.77}},
    {"label": "k=1_U=0",      "group": "k=1", "params": {"k0": 0, "U": 0}},
    {"label": "k=1_U=0.5Uc",  "group": "k=1", "params": {"k0": 0, "U": 67.95}},
    {"label": "k=1_U=0.9Uc",  "group": "k=1", "params": {"k0": 0, "U": 122.31}},
    {"label": "k=1_U=1.1Uc",  "group": "k=1", "params": {"k0": 0, "U": 149.49}},
    {"label": "k=1_U=1.5Uc",  "group": "k=1", "params": {"k0": 0, "U": 203.85}}
  ],
  "analysis": "growth"
})json"},
    Preset{"nonlin-energy-C", R"json({
  "name": "nonlin-energy-C",
  "description": "Clamped nonlinear energies; k = 1, b1 = 0, b2 = 1, U at multiples of the quoted U_crit 135.9",
  "notes": ["The quoted U_crit 135.9 is a CF value under the modal method; the clamped beam's own U_crit is about 636.7, so every run here is subcritical.",
            "The multiples of U_crit are not stated; 0.5, 1, 1.5 and 2 are used (2 U_crit is the two-energy comparison)."],
  "config": "C",
  "params": {"D": 1, "L": 1, "beta": 1, "k0": 0, "b1": 0, "b2": 1},
  "initial_data": {"kind": "polynomial"},
  "horizon": 10,
  "tolerances": {"rtol": 1e-6, "atol": 1e-8},
  "runs": [
    {"label": "U=0.5Uc", "params": {"U": 67.95}},
    {"label": "U=1Uc",   "params": {"U": 135.9}},
    {"label": "U=1.5Uc", "params": {"U": 203.85}},
    {"label": "U=2Uc",   "params": {"U": 271.8}}
  ],
  "analysis": "energy"
})json"},
    Preset{"blowup-cf", R"json({
  "name": "blowup-cf",
  "description": "In vacuo nonlinear cantilever from w = 0, w_t = c x; linear versus energy-consistent free end",
  "config": "CF",
  "params": {"D": 1, "L": 1, "beta": 0, "U": 0, "k0": 0, "b1": 0, "b2": 1},
  "horizon": 10,
  "tolerances": {"rtol": 1e-6, "atol": 1e-8},
  "runs": [
    {"label": "linear_c=12",   "group": "linear",   "free_end": "linear",   "initial_data": {"kind": "elementary", "scale": 12}},
    {"label": "linear_c=13",   "group": "linear",   "free_end": "linear",   "initial_data": {"kind": "elementary", "scale": 13}},
    {"label": "physical_c=12", "group": "physical", "free_end": "physical", "initial_data": {"kind": "elementary", "scale": 12}},
    {"label": "physical_c=13", "group": "physical", "free_end": "physical", "initial_data": {"kind": "elementary", "scale": 13}}
  ],
  "analysis": "dichotomy"
})json"},
    Preset{"lco-cf", R"json({
  "name": "lco-cf",
  "description": "Cantilever tip limit cycles: fluttering (k0 = 0, b2 = 1, U = 150) and in vacuo runs from three initial states, plus one run at twice the quoted U_crit",
  "notes": ["The fluttering runs use T = 40; at T = 10 the mode-2 run is still in its transient.",
            "The twice-U_crit run uses 2 x 135.9 = 271.8."],
  "config": "CF",
  "free_end": "physical",
  "params": {"D": 1, "L": 1, "beta": 1, "U": 150, "k0": 0, "b1": 0, "b2": 1},
  "tolerances": {"rtol": 1e-6, "atol": 1e-8},
  "sample_dt": 0.002,
  "runs": [
    {"label": "flutter_mode2",      "group": "flutter", "horizon": 40, "initial_data": {"kind": "mode", "n": 2}},
    {"label": "flutter_polynomial", "group": "flutter", "horizon": 40, "initial_data": {"kind": "polynomial"}},
    {"label": "flutter_elementary", "group": "flutter", "horizon": 40, "initial_data": {"kind": "elementary", "scale": 1}},
    {"label": "vacuo_mode2",        "group": "vacuo", "horizon": 10, "params": {"beta": 0, "U": 0}, "initial_data": {"kind": "mode", "n": 2}},
    {"label": "vacuo_polynomial",   "group": "vacuo", "horizon": 10, "params": {"beta": 0, "U": 0}, "initial_data": {"kind": "polynomial"}},
    {"label": "vacuo_elementary",   "group": "vacuo", "horizon": 10, "params": {"beta": 0, "U": 0}, "initial_data": {"kind": "elementary", "scale": 1}},
    {"label": "twice_ucrit",        "group": "twice", "horizon": 10, "params": {"U": 271.8}, "initial_data": {"kind": "polynomial"}}
  ],
  "analysis": "lco"
})json"},
    Preset{"buckle-C", R"json({
  "name": "buckle-C",
  "description": "Clamped buckling at U = 100, b2 = 1: b1 = 50 with k in {1, 2, 4}, b1 = 100 with k in {1, 2}",
  "notes": ["The initial state is not stated; the polynomial profile is used."],
  "config": "C",
  "params": {"D": 1, "L": 1, "beta": 1, "U": 100, "b2": 1},
  "initial_data": {"kind": "polynomial"},
  "horizon": 20,
  "tolerances": {"rtol": 1e-6, "atol": 1e-8},
  "outputs": ["trace", "snapshots", "report"],
  "runs": [
    {"label": "b1=50_k=1",  "group": "b1=50",  "params": {"b1": 50, "k0": 0}},
    {"label": "b1=50_k=2",  "group": "b1=50",  "params": {"b1": 50, "k0": 1}},
    {"label": "b1=50_k=4",  "group": "b1=50",  "params": {"b1": 50, "k0": 3}},
    {"label": "b1=100_k=1", "group": "b1=100", "params": {"b1": 100, "k0": 0}},
    {"label": "b1=100_k=2", "group": "b1=100", "params": {"b1": 100, "k0": 1}}
  ],
  "analysis": "steady"
})json"},
    Preset{"damping-lco-C", R"json({
  "name": "damping-lco-C",
  "description": "Clamped midpoint limit cycle at U = 5000, b1 = 20, b2 = 1 for several k",
  "notes": ["Caption gives b1 = 20; the body text gives b = 50 and b_0 = 1. The caption value b1 = 20 is used, with b2 = 1.",
            "The k values are not stated; 1, 10, 50 and 100 are used."],
  "config": "C",
  "params": {"D": 1, "L": 1, "beta": 1, "U": 5000, "b1": 20, "b2": 1},
  "initial_data": {"kind": "polynomial"},
  "horizon": 4,
  "sample_dt": 2e-4,
  "tolerances": {"rtol": 1e-6, "atol": 1e-8},
  "runs": [
    {"label": "k=1",   "params": {"k0": 0}},
    {"label": "k=10",  "params": {"k0": 9}},
    {"label": "k=50",  "params": {"k0": 49}},
    {"label": "k=100", "params": {"k0": 99}}
  ],
  "analysis": "lco"
})json"},
    Preset{"nonsimple-lco", R"json({
  "name": "nonsimple-lco",
  "description": "Clamped non-simple limit cycle; U = 5000, b1 = 5000, b2 = 5000, k = 101",
  "notes": ["Caption gives b2 = 5000, k = 101; the body text gives b2 = 1000, k = 100. The caption values are used."],
  "config": "C",
  "params": {"D": 1, "L": 1, "beta": 1, "U": 5000, "k0": 100, "b1": 5000, "b2": 5000},
  "initial_data": {"kind": "polynomial"},
  "horizon": 4,
  "sample_dt": 2e-4,
  "tolerances": {"rtol": 1e-6, "atol": 1e-8},
  "analysis": "lco"
})json"},
    Preset{"chaos-h", R"json({
  "name": "chaos-h",
  "description": "Hinged beam past Euler buckling; U = 200, b1 = 2000, b2 = 1, k0 = 1, beta = 1, w0 = eps sin(2 pi x), w1 = x (1 - x)",
  "notes": ["Horizon and sampling are not stated; T = 20 and sample_dt = 2e-4 (30 or more samples per oscillation) are used."],
  "config": "H",
  "params": {"D": 1, "L": 1, "beta": 1, "U": 200, "k0": 1, "b1": 2000, "b2": 1},
  "horizon": 20,
  "sample_dt": 2e-4,
  "tolerances": {"rtol": 1e-6, "atol": 1e-8},
  "runs": [
    {"label": "eps=0",     "initial_data": {"kind": "sine", "eps": 0}},
    {"label": "eps=0.1",   "initial_data": {"kind": "sine", "eps": 0.1}},
    {"label": "eps=0.01",  "initial_data": {"kind": "sine", "eps": 0.01}},
    {"label": "eps=0.001", "initial_data": {"kind": "sine", "eps": 0.001}}
  ],
  "analysis": "chaos"
})json"},
    Preset{"b2-plateau", R"json({
  "name": "b2-plateau",
  "description": "Clamped late-time energy plateau against b2; k0 = 0, U = 150",
  "notes": ["The quoted U_crit 135.97 is a CF value under the modal method; the clamped beam's own U_crit is about 636.7, so U = 150 is subcritical for C and every run decays."],
  "config": "C",
  "params": {"D": 1, "L": 1, "beta": 1, "U": 150, "k0": 0, "b1": 0},
  "initial_data": {"kind": "polynomial"},
  "horizon": 20,
  "tolerances": {"rtol": 1e-6, "atol": 1e-8},
  "runs": [
    {"label": "b2=0.5", "params": {"b2": 0.5}},
    {"label": "b2=1",   "params": {"b2": 1}},
    {"label": "b2=2",   "params": {"b2": 2}},
    {"label": "b2=4",   "params": {"b2": 4}}
  ],
  "analysis": "plateau"
})json"},
};

const Preset* lookup(std::string_view name) {
    const auto it = std::find_if(kPresets.begin(), kPresets.end(), [&](const Preset& p) { return p.name == name; });
    return it == kPresets.end() ? nullptr : &*it;
}

} // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& p : kPresets) out.emplace_back(p.name);
    return out;
}

bool has_preset(std::string_view name) { return lookup(name) != nullptr; }

std::string_view preset_document(std::string_view name) {
    const Preset* p = lookup(name);
    if (!p) throw InvalidParams("unknown preset '" + std::string(name) + "'");
    return p->document;
}

Scenario load_preset(std::string_view name) { return parse_scenario(preset_document(name)); }

} // namespace beamflutter
