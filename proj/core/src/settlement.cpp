#include "eva/settlement.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

#include "csv_util.hpp"
#include "eva/error.hpp"

namespace eva {

SettlementReport settle_day(std::span<const HourLog> hours, std::span<const DepartedEv> departed,
                            std::span<const UnmetEnergy> unmet, const MpcConfig& config) {
  if (hours.empty()) throw AccountingError("settle_day: no hourly logs");
  SettlementReport r;
  double cleared = 0.0;
  double delivered = 0.0;
  for (std::size_t k = 0; k < hours.size(); ++k) {
    const HourLog& h = hours[k];
    if (h.hour != hours.front().hour + static_cast<int>(k)) {
      throw AccountingError("settle_day: missing log for hour " + std::to_string(hours.front().hour + static_cast<int>(k)));
    }
    if (h.omega < 0.0 || h.omega > h.R_cleared + 1e-9 * std::max(1.0, h.R_cleared)) {
      throw AccountingError("settle_day: hour " + std::to_string(h.hour) + " shortfall outside [0, R]");
    }
    r.energy_cost += h.lambda * h.energy_kwh / 1000.0;
    r.degradation_cost += config.psi * h.discharge_kwh / 1000.0;
    r.regulation_payment += h.mu * h.R_cleared / 1000.0;
    r.penalty += config.phi * h.omega / 1000.0;
    cleared += h.R_cleared;
    delivered += h.R_cleared - h.omega;
  }
  r.owner_compensation = config.sigma * delivered / 1000.0;
  r.daily_revenue = r.regulation_payment - r.energy_cost - r.degradation_cost - r.penalty - r.owner_compensation;
  r.fulfillment_ratio = cleared > 0.0 ? std::clamp(delivered / cleared, 0.0, 1.0) : 1.0;

  double total_dev = 0.0;
  for (const DepartedEv& d : departed) {
    const double dev = std::abs(d.soc_final - d.soc_r);
    total_dev += dev;
    r.worst_soc_dev = std::max(r.worst_soc_dev, dev);
    double& by_mode = d.mode == Mode::V1G ? r.worst_soc_dev_v1g : r.worst_soc_dev_v2g;
    by_mode = std::max(by_mode, dev);
  }
  r.departed = static_cast<int>(departed.size());
  r.mean_soc_dev = departed.empty() ? 0.0 : total_dev / static_cast<double>(departed.size());
  r.unmet_energy_log.assign(unmet.begin(), unmet.end());
  return r;
}

void write_decision_log_csv(std::ostream& out, std::span<const HourLog> hours) {
  using detail::format_double;
  out << "hour,R_bid_kw,omega_kw,energy_kwh,objective\n";
  for (const HourLog& h : hours) {
    out << h.hour << ',' << format_double(h.R_bid) << ',' << format_double(h.omega) << ','
        << format_double(h.energy_kwh) << ',' << format_double(h.objective) << '\n';
  }
}

void write_report_json(std::ostream& out, const SettlementReport& r, const std::string& strategy) {
  nlohmann::ordered_json j;
  j["strategy"] = strategy;
  j["energy_cost"] = r.energy_cost;
  j["degradation_cost"] = r.degradation_cost;
  j["regulation_payment"] = r.regulation_payment;
  j["penalty"] = r.penalty;
  j["owner_compensation"] = r.owner_compensation;
  j["daily_revenue"] = r.daily_revenue;
  j["worst_soc_dev"] = r.worst_soc_dev;
  j["mean_soc_dev"] = r.mean_soc_dev;
  j["worst_soc_dev_v1g"] = r.worst_soc_dev_v1g;
  j["worst_soc_dev_v2g"] = r.worst_soc_dev_v2g;
  j["fulfillment_ratio"] = r.fulfillment_ratio;
  j["departed"] = r.departed;
  auto& log = j["unmet_energy_log"] = nlohmann::ordered_json::array();
  for (const UnmetEnergy& u : r.unmet_energy_log) {
    log.push_back({{"id", u.id}, {"hour", u.hour}, {"kwh", u.kwh}});
  }
  out << j.dump(2) << '\n';
}

void write_comparison_csv(std::ostream& out, std::span<const NamedReport> rows) {
  using detail::format_double;
  out << "strategy,energy_cost,degradation,reg_payment,penalty,daily_revenue,worst_soc_dev,fulfillment\n";
  for (const NamedReport& row : rows) {
    const SettlementReport& r = row.report;
    out << row.strategy << ',' << format_double(r.energy_cost) << ',' << format_double(r.degradation_cost) << ','
        << format_double(r.regulation_payment) << ',' << format_double(r.penalty) << ','
        << format_double(r.daily_revenue) << ',' << format_double(r.worst_soc_dev) << ','
        << format_double(r.fulfillment_ratio) << '\n';
  }
}

}  // namespace eva
