#include "zoomv/cost_model.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace zoomv {

CostTable CostTable::defaults() {
    CostTable t;
    t.rows[CallKind::ground] = CostRow{64, 1157.0, 424.0};
    t.rows[CallKind::reflect_yesno] = CostRow{80, 1496.0, 406.0};
    t.rows[CallKind::reflect_mc] = CostRow{80, 1496.0, 406.0};
    t.rows[CallKind::answer] = CostRow{80, 1496.0, 406.0};
    return t;
}

CostTable CostTable::from_file(std::string const& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cost table: cannot open " + path);
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (nlohmann::json::exception const& e) {
        throw std::runtime_error("cost table: invalid JSON in " + path + ": " + e.what());
    }

    CostTable t = defaults();
    auto load = [&](char const* name, CallKind kind) {
        if (!doc.contains(name)) return;
        nlohmann::json const& row = doc.at(name);
        CostRow r;
        r.reference_frames = row.at("reference_frames").get<int>();
        r.prefill_ms_at_reference = row.at("prefill_ms").get<double>();
        r.decode_ms = row.at("decode_ms").get<double>();
        if (r.reference_frames < 1 || r.prefill_ms_at_reference < 0 || r.decode_ms < 0) {
            throw std::runtime_error("cost table: negative latency or zero reference frames");
        }
        t.rows[kind] = r;
    };
    load("ground", CallKind::ground);
    load("reflect_yesno", CallKind::reflect_yesno);
    load("reflect_mc", CallKind::reflect_mc);
    load("answer", CallKind::answer);
    return t;
}

double call_cost_ms(BackendCall const& call, CostTable const& table, bool prefix_cache) {
    auto it = table.rows.find(call.kind);
    if (it == table.rows.end()) {
        throw std::invalid_argument("call_cost_ms: unknown call kind");
    }
    if (call.frames_uncached > call.frames_total || call.frames_uncached < 0) {
        throw std::invalid_argument("call_cost_ms: frames_uncached must be in [0, frames_total]");
    }
    CostRow const& row = it->second;
    int frames_charged = prefix_cache ? call.frames_uncached : call.frames_total;
    double prefill =
        row.prefill_ms_at_reference * static_cast<double>(frames_charged) / row.reference_frames;
    return prefill + row.decode_ms;
}

StepCost step_cost(std::vector<BackendCall> const& calls, CostTable const& table,
                   bool prefix_cache) {
    StepCost cost;
    cost.per_call_ms.reserve(calls.size());
    for (BackendCall const& call : calls) {
        double ms = call_cost_ms(call, table, prefix_cache);
        cost.per_call_ms.push_back(ms);
        cost.total_ms += ms;
    }
    return cost;
}

}  // namespace zoomv
