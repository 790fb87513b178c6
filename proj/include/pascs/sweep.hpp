#pragma once

#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "pascs/errors.hpp"
#include "pascs/io.hpp"
#include "pascs/moments.hpp"
#include "pascs/pnd.hpp"
#include "pascs/state_spec.hpp"
#include "pascs/wigner.hpp"
#include "pascs/witnesses.hpp"

namespace pascs {

enum class SweepParam { M, AlphaRe, AlphaIm, AlphaMod, AlphaArg, R, Phi };

inline SweepParam sweep_param_from_string(const std::string& name) {
  if (name == "m") return SweepParam::M;
  if (name == "alpha_re") return SweepParam::AlphaRe;
  if (name == "alpha_im") return SweepParam::AlphaIm;
  if (name == "alpha_mod") return SweepParam::AlphaMod;
  if (name == "alpha_arg") return SweepParam::AlphaArg;
  if (name == "r") return SweepParam::R;
  if (name == "phi") return SweepParam::Phi;
  throw argument_error("unknown sweep parameter '" + name +
                       "' (expected m|alpha_re|alpha_im|alpha_mod|alpha_arg|r|phi)");
}

inline const char* to_string(SweepParam p) {
  switch (p) {
    case SweepParam::M: return "m";
    case SweepParam::AlphaRe: return "alpha_re";
    case SweepParam::AlphaIm: return "alpha_im";
    case SweepParam::AlphaMod: return "alpha_mod";
    case SweepParam::AlphaArg: return "alpha_arg";
    case SweepParam::R: return "r";
    default: return "phi";
  }
}

struct SweptAxis {
  SweepParam param;
  double start = 0.0;
  double stop = 0.0;
  int steps = 2;

  double value_at(int i) const { return start + (stop - start) * i / (steps - 1.0); }
};

enum class SweepFormat { Csv, Json };

struct SweepConfig {
  StateSpec base;
  std::vector<SweptAxis> axes;          // one or two
  std::vector<std::string> quantities;  // Q, D1.., d1.., A3, S2.., eta, delta
  SweepFormat format = SweepFormat::Csv;
  int threads = 0;                      // 0 = hardware default
  double volume_tol = 1e-6;
  int pnd_n_max = 40;

  void validate() const {
    if (axes.empty() || axes.size() > 2)
      throw argument_error("sweep: need one or two swept parameters");
    for (const auto& ax : axes)
      if (ax.steps < 2) throw argument_error("sweep: steps must be >= 2");
    if (quantities.empty()) throw argument_error("sweep: no quantities selected");
  }
};

namespace detail {

inline StateSpec apply_axis(const StateSpec& spec, SweepParam param, double v) {
  Complex a = spec.alpha;
  int m = spec.m;
  double r = spec.r, phi = spec.phi;
  switch (param) {
    case SweepParam::M: m = static_cast<int>(std::lround(v)); break;
    case SweepParam::AlphaRe: a = Complex(v, a.imag()); break;
    case SweepParam::AlphaIm: a = Complex(a.real(), v); break;
    case SweepParam::AlphaMod: a = std::polar(v, std::arg(a == Complex(0.0, 0.0) ? Complex(1.0, 0.0) : a)); break;
    case SweepParam::AlphaArg: a = std::polar(std::abs(a), v); break;
    case SweepParam::R: r = v; break;
    case SweepParam::Phi: phi = v; break;
  }
  return StateSpec(spec.op, m, a, r, phi);
}

// One witness/derived quantity by name; empty result means undefined.
inline std::string evaluate_quantity(const StateSpec& spec, const std::string& name,
                                     const SweepConfig& cfg, MomentTable& table) {
  try {
    if (name == "Q") return format_double(mandel_q(table));
    if (name == "A3") return format_double(agarwal_a3(table));
    if (name.size() >= 2 && name[0] == 'D')
      return format_double(hoa(table, std::stoi(name.substr(1)) + 1));
    if (name.size() >= 2 && name[0] == 'd')
      return format_double(hosps(table, std::stoi(name.substr(1)) + 1));
    if (name.size() >= 2 && name[0] == 'S')
      return format_double(hong_mandel(spec, table, std::stoi(name.substr(1))));
    if (name == "eta") return format_double(eta(pnd(spec, cfg.pnd_n_max)));
    if (name == "delta") return format_double(nonclassical_volume(spec, cfg.volume_tol).delta);
  } catch (const undefined_witness_error&) {
    return "";
  }
  throw argument_error("unknown quantity '" + name + "'");
}

}  // namespace detail

// Deterministic sweep: rows are gathered into grid order regardless of the
// number of worker threads, so output bytes never depend on concurrency.
inline void run_sweep(const SweepConfig& cfg, std::ostream& os) {
  cfg.validate();
  const int n0 = cfg.axes[0].steps;
  const int n1 = cfg.axes.size() > 1 ? cfg.axes[1].steps : 1;
  const int total = n0 * n1;

  std::vector<std::vector<std::string>> rows(total);
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;

  auto worker = [&]() {
    for (;;) {
      int idx = next.fetch_add(1);
      if (idx >= total) return;
      try {
        int i0 = idx / n1, i1 = idx % n1;
        StateSpec spec = detail::apply_axis(cfg.base, cfg.axes[0].param, cfg.axes[0].value_at(i0));
        if (cfg.axes.size() > 1)
          spec = detail::apply_axis(spec, cfg.axes[1].param, cfg.axes[1].value_at(i1));
        std::vector<std::string> row;
        row.push_back(format_double(cfg.axes[0].value_at(i0)));
        if (cfg.axes.size() > 1) row.push_back(format_double(cfg.axes[1].value_at(i1)));
        for (const auto& [k, v] : kv_record(spec)) row.push_back(v);
        if (spec.degenerate()) {
          for (size_t q = 0; q < cfg.quantities.size(); ++q) row.push_back("");
          row.push_back("1");
        } else {
          MomentTable table(spec);
          for (const auto& q : cfg.quantities)
            row.push_back(detail::evaluate_quantity(spec, q, cfg, table));
          row.push_back("0");
        }
        rows[idx] = std::move(row);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  int n_threads = cfg.threads > 0 ? cfg.threads
                                  : std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);

  std::vector<std::string> header;
  header.push_back(to_string(cfg.axes[0].param));
  if (cfg.axes.size() > 1) header.push_back(std::string(to_string(cfg.axes[1].param)) + "_2");
  for (const auto& [k, v] : kv_record(cfg.base)) header.push_back(k);
  for (const auto& q : cfg.quantities) header.push_back(q);
  header.push_back("degenerate");

  if (cfg.format == SweepFormat::Csv) {
    os << "# " << kv_string(cfg.base) << "\n";
    os << csv_row(header);
    for (const auto& row : rows) os << csv_row(row);
  } else {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& row : rows) {
      nlohmann::json obj;
      for (size_t i = 0; i < header.size(); ++i) obj[header[i]] = row[i];
      out.push_back(obj);
    }
    os << out.dump(2) << "\n";
  }
}

// --- figure presets ---

inline Complex preset_alpha_main() { return std::polar(std::sqrt(2.0 / 3.0), k_two_pi / 6.0); }
inline Complex preset_alpha_wigner() { return std::polar(0.2, k_two_pi / 6.0); }

struct PresetOutput {
  std::string filename;
  std::function<void(std::ostream&)> emit;
};

// Parameter sets follow the corresponding figure captions; sweep ranges are
// chosen to cover the plotted regions.
inline std::vector<PresetOutput> preset_outputs(const std::string& name, int threads) {
  const Complex a_main = preset_alpha_main();
  const Complex a_wig = preset_alpha_wigner();
  auto sweep_file = [threads](const std::string& fname, StateSpec base, SweptAxis ax0,
                              std::vector<std::string> quantities,
                              std::vector<SweptAxis> more = {}) {
    SweepConfig cfg;
    cfg.base = base;
    cfg.axes = {ax0};
    for (auto& ax : more) cfg.axes.push_back(ax);
    cfg.quantities = std::move(quantities);
    cfg.threads = threads;
    return PresetOutput{fname, [cfg](std::ostream& os) { run_sweep(cfg, os); }};
  };
  const SweptAxis m_axis{SweepParam::M, 0, 3, 4};
  const SweptAxis r01{SweepParam::R, 0.0, 1.0, 101};
  const SweptAxis phi_2pi{SweepParam::Phi, 0.0, k_two_pi, 121};
  const SweptAxis phi_4pi{SweepParam::Phi, 0.0, 2.0 * k_two_pi, 241};

  if (name == "fig1a")
    return {sweep_file("fig1a.csv", StateSpec(Operation::Add, 0, a_main, 0.0, 0.0), r01, {"D1"}, {m_axis})};
  if (name == "fig1b")
    return {sweep_file("fig1b.csv", StateSpec(Operation::Add, 0, a_main, 0.0, 0.0), r01, {"D2"}, {m_axis})};
  if (name == "fig1c")
    return {sweep_file("fig1c.csv", StateSpec(Operation::Add, 0, a_main, 0.1, 0.0), phi_4pi, {"D1"}, {m_axis})};
  if (name == "fig1d")
    return {sweep_file("fig1d.csv", StateSpec(Operation::Add, 0, a_main, 0.4, 0.0), phi_2pi, {"D2"}, {m_axis})};
  if (name == "fig2a")
    return {sweep_file("fig2a.csv", StateSpec(Operation::Subtract, 0, a_main, 0.0, 0.0), r01, {"D1"}, {m_axis})};
  if (name == "fig2b")
    return {sweep_file("fig2b.csv", StateSpec(Operation::Subtract, 0, a_main, 0.0, 0.0), r01, {"D2"}, {m_axis})};
  if (name == "fig2c")
    return {sweep_file("fig2c.csv", StateSpec(Operation::Subtract, 0, a_main, 0.1, 0.0), phi_2pi, {"D1"}, {m_axis})};
  if (name == "fig2d")
    return {sweep_file("fig2d.csv", StateSpec(Operation::Subtract, 0, a_main, 0.4, 0.0), phi_2pi, {"D2"}, {m_axis})};
  if (name == "fig3a")
    return {sweep_file("fig3a.csv", StateSpec(Operation::Add, 0, a_main, 0.0, 0.0), r01, {"d1"}, {m_axis})};
  if (name == "fig3b")
    return {sweep_file("fig3b.csv", StateSpec(Operation::Add, 0, a_main, 0.0, 0.0), r01, {"d2"}, {m_axis})};
  if (name == "fig3c")
    return {sweep_file("fig3c.csv", StateSpec(Operation::Add, 0, a_main, 0.2, 0.0), phi_2pi, {"d2"}, {m_axis})};
  if (name == "fig3d")
    return {sweep_file("fig3d.csv", StateSpec(Operation::Add, 0, a_main, 0.4, 0.0), phi_2pi, {"d2"}, {m_axis})};
  if (name == "fig4a")
    return {sweep_file("fig4a.csv", StateSpec(Operation::Subtract, 0, a_main, 0.0, 0.0), r01, {"d1"}, {m_axis})};
  if (name == "fig4b")
    return {sweep_file("fig4b.csv", StateSpec(Operation::Subtract, 0, a_main, 0.0, 0.0), r01, {"d2"}, {m_axis})};
  if (name == "fig4c")
    return {sweep_file("fig4c.csv", StateSpec(Operation::Subtract, 0, a_main, 0.2, 0.0), phi_2pi, {"d2"}, {m_axis})};
  if (name == "fig4d")
    return {sweep_file("fig4d.csv", StateSpec(Operation::Subtract, 0, a_main, 0.4, 0.0), phi_2pi, {"d2"}, {m_axis})};

  if (name == "fig5a") {
    return {PresetOutput{"fig5a.csv", [](std::ostream& os) {
      os << "op,m,alpha_re,alpha_im,r,phi,n,B\n";
      for (Operation op : {Operation::Add, Operation::Subtract}) {
        for (double r : {0.1, 0.3, 0.5}) {
          StateSpec spec(op, 1, Complex(1.0, 0.0), r, 0.0);
          auto dist = pnd(spec, 14);
          for (int n = 0; n <= 10; ++n) {
            std::vector<std::string> row;
            for (const auto& [k, v] : kv_record(spec)) row.push_back(v);
            row.push_back(std::to_string(n));
            row.push_back(format_double(klyshko(dist, n)));
            os << csv_row(row);
          }
        }
      }
    }}};
  }
  if (name == "fig5b") {
    return {PresetOutput{"fig5b.csv", [](std::ostream& os) {
      os << "op,m,alpha_re,alpha_im,r,phi,alpha_mod,eta\n";
      for (Operation op : {Operation::Add, Operation::Subtract}) {
        for (double r : {0.1, 0.3, 0.5}) {
          for (int i = 0; i < 79; ++i) {
            double mod = 0.05 + (2.0 - 0.05) * i / 78.0;
            StateSpec spec(op, 1, std::polar(mod, 0.0), r, 0.0);
            std::vector<std::string> row;
            for (const auto& [k, v] : kv_record(spec)) row.push_back(v);
            row.push_back(format_double(mod));
            std::string cell;
            try {
              cell = format_double(eta(pnd(spec, 40)));
            } catch (const undefined_witness_error&) {
            }
            row.push_back(cell);
            os << csv_row(row);
          }
        }
      }
    }}};
  }

  if (name == "fig6a")
    return {sweep_file("fig6a.csv", StateSpec(Operation::Add, 0, a_main, 0.0, 0.0), r01, {"A3"}, {m_axis})};
  if (name == "fig6b")
    return {sweep_file("fig6b.csv", StateSpec(Operation::Add, 0, a_main, 0.3, 0.0), phi_2pi, {"A3"}, {m_axis})};
  if (name == "fig6c")
    return {sweep_file("fig6c.csv", StateSpec(Operation::Subtract, 0, a_main, 0.0, 0.0), r01, {"A3"}, {m_axis})};
  if (name == "fig6d")
    return {sweep_file("fig6d.csv", StateSpec(Operation::Subtract, 0, a_main, 0.3, 0.0), phi_2pi, {"A3"}, {m_axis})};

  if (name == "fig7" || name == "fig8") {
    Operation op = (name == "fig7") ? Operation::Add : Operation::Subtract;
    std::vector<PresetOutput> outs;
    for (int m = 0; m <= 3; ++m) {
      StateSpec spec(op, m, a_wig, 0.1, 0.0);
      outs.push_back({name + "_m" + std::to_string(m) + ".csv", [spec](std::ostream& os) {
                        wigner_grid_csv(wigner_grid(spec, 4.0, 81), os);
                      }});
    }
    return outs;
  }

  const SweptAxis r_vol{SweepParam::R, 0.05, 0.5, 10};
  const SweptAxis phi_vol{SweepParam::Phi, 0.0, k_two_pi, 13};
  if (name == "fig9a")
    return {sweep_file("fig9a.csv", StateSpec(Operation::Add, 0, a_wig, 0.0, 0.0), r_vol, {"delta"}, {m_axis})};
  if (name == "fig9b")
    return {sweep_file("fig9b.csv", StateSpec(Operation::Subtract, 0, a_wig, 0.0, 0.0), r_vol, {"delta"}, {m_axis})};
  if (name == "fig9c")
    return {sweep_file("fig9c.csv", StateSpec(Operation::Add, 0, a_wig, 0.3, 0.0), phi_vol, {"delta"}, {m_axis})};
  if (name == "fig9d")
    return {sweep_file("fig9d.csv", StateSpec(Operation::Subtract, 0, a_wig, 0.3, 0.0), phi_vol, {"delta"}, {m_axis})};

  throw argument_error("unknown preset '" + name + "'");
}

inline std::vector<std::string> preset_names() {
  return {"fig1a", "fig1b", "fig1c", "fig1d", "fig2a", "fig2b", "fig2c", "fig2d",
          "fig3a", "fig3b", "fig3c", "fig3d", "fig4a", "fig4b", "fig4c", "fig4d",
          "fig5a", "fig5b", "fig6a", "fig6b", "fig6c", "fig6d", "fig7",  "fig8",
          "fig9a", "fig9b", "fig9c", "fig9d"};
}

}  // namespace pascs
