#include "ciphermatch/cost_model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ciphermatch::cost {

namespace {

double ceil_div_d(double num, double den) { return std::ceil(num / den); }

}  // namespace

const char* system_name(SystemKind kind) {
    switch (kind) {
        case SystemKind::CmSw: return "CM-SW";
        case SystemKind::CmPum: return "CM-PuM";
        case SystemKind::CmPumSsd: return "CM-PuM-SSD";
        case SystemKind::CmIfp: return "CM-IFP";
    }
    return "?";
}

double CostBreakdown::total_latency_ns() const {
    return storage_read.latency_ns + io_transfer.latency_ns +
           dram_transfer.latency_ns + compute.latency_ns + index_gen.latency_ns;
}

double CostBreakdown::total_energy_nj() const {
    return storage_read.energy_nj + io_transfer.energy_nj +
           dram_transfer.energy_nj + compute.energy_nj + index_gen.energy_nj;
}

double t_bop_add_ns(const NandTimingParams& p) {
    return p.t_read_ns + 2.0 * p.t_xor_ns + 5.0 * p.t_latch_transfer_ns +
           4.0 * p.t_and_or_ns;
}

double t_bit_add_ns(const NandTimingParams& p) {
    return t_bop_add_ns(p) + 2.0 * p.t_dma_ns;
}

double e_bop_add_nj(const NandTimingParams& p, std::uint64_t page_bytes) {
    const double page_kb = static_cast<double>(page_bytes) / 1024.0;
    return p.e_read_nj_per_channel + 2.0 * p.e_xor_nj_per_kb * page_kb +
           5.0 * p.e_latch_transfer_nj_per_kb * page_kb +
           4.0 * p.e_and_or_nj_per_kb * page_kb;
}

double e_bit_add_nj(const NandTimingParams& p, std::uint64_t page_bytes) {
    return e_bop_add_nj(p, page_bytes) + 2.0 * p.e_dma_nj_per_channel +
           p.e_index_gen_nj_per_page;
}

bool transpose_overlapped(const NandTimingParams& p) {
    return p.t_transpose_ns <= p.t_read_ns;
}

bool index_gen_overlapped(const NandTimingParams& p) {
    return p.t_index_gen_ns <= p.t_read_ns;
}

std::uint64_t ifp_lanes(const SsdTopology& ssd) {
    return ssd.channels * ssd.dies_per_channel * ssd.planes_per_die *
           ssd.page_bytes * 8;
}

std::uint64_t pum_lanes(const PumParams& pum) {
    return pum.channels * pum.banks_per_channel * pum.row_bytes * 8;
}

std::uint64_t pum_ssd_lanes(const PumParams& pum) {
    return pum.internal_banks * pum.row_bytes * 8;
}

namespace {

struct WorkShape {
    double db_bytes;      // E
    double coeff_adds;    // coefficient additions per full-database pass
    double passes;        // num_queries * shift_count
    double num_queries;
    bool empty;
};

WorkShape shape_of(const Workload& w) {
    WorkShape s{};
    s.db_bytes = static_cast<double>(w.encrypted_db_bytes);
    s.coeff_adds = s.db_bytes / 4.0;  // one add per 32-bit coefficient
    s.passes = static_cast<double>(w.num_queries) *
               static_cast<double>(w.shift_count);
    s.num_queries = static_cast<double>(w.num_queries);
    s.empty = w.encrypted_db_bytes == 0 || s.passes == 0.0;
    return s;
}

CostBreakdown cost_cm_sw(const Workload& w, const SystemConfigs& cfg) {
    CostBreakdown b;
    const WorkShape s = shape_of(w);
    if (s.empty) {
        b.assumptions.push_back("cm-sw: empty workload, zero cost");
        return b;
    }
    const bool resident = s.db_bytes <= cfg.host.dram_capacity_bytes;
    const double read_mult = resident ? 1.0 : s.num_queries;
    b.assumptions.push_back(
        resident
            ? "cm-sw: encrypted db fits in host dram, read from ssd once"
            : "cm-sw: db exceeds host dram, streamed from ssd once per query "
              "(all shifts applied per chunk)");
    b.assumptions.push_back("cm-sw: flash sensing hidden behind external i/o");
    b.assumptions.push_back(
        "cm-sw: index generation = match-polynomial scan at memory bandwidth");

    const double read_bytes = s.db_bytes * read_mult;
    b.io_transfer.latency_ns =
        read_bytes / cfg.ssd.external_io_bw_bytes_per_s * 1e9;
    b.io_transfer.energy_nj = read_bytes * cfg.host.ssd_read_nj_per_byte;

    const double dram_bytes = s.passes * s.db_bytes;
    b.dram_transfer.latency_ns = dram_bytes / cfg.host.dram_bw_bytes_per_s * 1e9;
    b.dram_transfer.energy_nj = dram_bytes * cfg.host.dram_nj_per_byte;

    b.compute.latency_ns = s.passes * s.coeff_adds /
                           cfg.host.cpu_add_throughput_coeffs_per_s * 1e9;
    b.compute.energy_nj = cfg.host.cpu_power_w * b.compute.latency_ns;

    b.index_gen.latency_ns =
        s.passes * s.db_bytes / cfg.host.scan_bw_bytes_per_s * 1e9;
    b.index_gen.energy_nj = cfg.host.cpu_power_w * b.index_gen.latency_ns;
    return b;
}

CostBreakdown cost_cm_pum(const Workload& w, const SystemConfigs& cfg) {
    CostBreakdown b;
    const WorkShape s = shape_of(w);
    if (s.empty) {
        b.assumptions.push_back("cm-pum: empty workload, zero cost");
        return b;
    }
    const bool resident = s.db_bytes <= cfg.host.dram_capacity_bytes;
    const double load_mult = resident ? 1.0 : s.num_queries;
    b.assumptions.push_back(
        resident ? "cm-pum: db resident in host dram after one load"
                 : "cm-pum: db exceeds host dram, loaded once per query");
    b.assumptions.push_back(
        "cm-pum: vertical-layout transposition costs one extra dram pass per load");
    b.assumptions.push_back(
        "cm-pum: bit-serial add = " +
        std::to_string(cfg.pum.bbops_per_bit_add) +
        " row-wide bulk ops per bit, all banks in parallel");

    const double load_bytes = s.db_bytes * load_mult;
    b.io_transfer.latency_ns =
        load_bytes / cfg.ssd.external_io_bw_bytes_per_s * 1e9;
    b.io_transfer.energy_nj = load_bytes * cfg.host.ssd_read_nj_per_byte;

    const double transpose_bytes = 2.0 * load_bytes;
    b.dram_transfer.latency_ns =
        transpose_bytes / cfg.host.dram_bw_bytes_per_s * 1e9;
    b.dram_transfer.energy_nj = transpose_bytes * cfg.host.dram_nj_per_byte;

    const double lanes = static_cast<double>(pum_lanes(cfg.pum));
    const double batches = ceil_div_d(s.coeff_adds, lanes);
    const double word_bits = 32.0;
    b.compute.latency_ns = s.passes * batches * word_bits *
                           static_cast<double>(cfg.pum.bbops_per_bit_add) *
                           cfg.pum.t_bbop_ns;
    const double row_ops =
        s.passes * batches * word_bits *
        static_cast<double>(cfg.pum.bbops_per_bit_add) *
        static_cast<double>(cfg.pum.channels * cfg.pum.banks_per_channel);
    b.compute.energy_nj = row_ops * cfg.pum.e_bbop_nj;

    b.index_gen.latency_ns =
        s.passes * s.db_bytes / cfg.host.scan_bw_bytes_per_s * 1e9;
    b.index_gen.energy_nj = s.passes * s.db_bytes * cfg.host.dram_nj_per_byte;
    return b;
}

CostBreakdown cost_cm_pum_ssd(const Workload& w, const SystemConfigs& cfg) {
    CostBreakdown b;
    const WorkShape s = shape_of(w);
    if (s.empty) {
        b.assumptions.push_back("cm-pum-ssd: empty workload, zero cost");
        return b;
    }
    b.assumptions.push_back(
        "cm-pum-ssd: db streamed through the ssd-internal dram once per pass");
    const double agg_channel_bw =
        cfg.ssd.channel_bw_bytes_per_s * static_cast<double>(cfg.ssd.channels);

    const double io_bytes = s.passes * s.db_bytes;
    b.io_transfer.latency_ns = io_bytes / agg_channel_bw * 1e9;
    const double pages =
        s.passes * ceil_div_d(s.db_bytes, static_cast<double>(cfg.ssd.page_bytes));
    b.io_transfer.energy_nj = pages * cfg.nand.e_dma_nj_per_channel;

    b.dram_transfer.latency_ns =
        io_bytes / cfg.pum.internal_dram_bw_bytes_per_s * 1e9;
    b.dram_transfer.energy_nj = io_bytes * cfg.pum.internal_dram_nj_per_byte;

    const double lanes = static_cast<double>(pum_ssd_lanes(cfg.pum));
    const double batches = ceil_div_d(s.coeff_adds, lanes);
    const double word_bits = 32.0;
    b.compute.latency_ns = s.passes * batches * word_bits *
                           static_cast<double>(cfg.pum.bbops_per_bit_add) *
                           cfg.pum.t_bbop_ns;
    const double row_ops = s.passes * batches * word_bits *
                           static_cast<double>(cfg.pum.bbops_per_bit_add) *
                           static_cast<double>(cfg.pum.internal_banks);
    b.compute.energy_nj = row_ops * cfg.pum.e_bbop_nj;

    if (index_gen_overlapped(cfg.nand)) {
        b.assumptions.push_back(
            "cm-pum-ssd: controller index generation overlapped with flash reads");
    } else {
        b.index_gen.latency_ns =
            pages * (cfg.nand.t_index_gen_ns - cfg.nand.t_read_ns);
    }
    b.index_gen.energy_nj = pages * cfg.nand.e_index_gen_nj_per_page;
    return b;
}

CostBreakdown cost_cm_ifp(const Workload& w, const SystemConfigs& cfg) {
    CostBreakdown b;
    const WorkShape s = shape_of(w);
    if (s.empty) {
        b.assumptions.push_back("cm-ifp: empty workload, zero cost");
        return b;
    }
    b.assumptions.push_back(
        "cm-ifp: flash reads and query/result dma are inside t_bit_add");
    b.assumptions.push_back(
        "cm-ifp: one coefficient add = 32 x t_bit_add, all lanes concurrent");
    b.assumptions.push_back(
        transpose_overlapped(cfg.nand)
            ? "cm-ifp: transposition overlapped with flash reads"
            : "cm-ifp: transposition NOT overlapped (exceeds t_read)");

    const double lanes = static_cast<double>(ifp_lanes(cfg.ssd));
    const double batches = ceil_div_d(s.coeff_adds, lanes);
    const double word_bits = 32.0;
    b.compute.latency_ns = s.passes * batches * word_bits * t_bit_add_ns(cfg.nand);
    b.compute.energy_nj = s.passes * batches * word_bits *
                          static_cast<double>(cfg.ssd.channels) *
                          e_bit_add_nj(cfg.nand, cfg.ssd.page_bytes);

    if (index_gen_overlapped(cfg.nand)) {
        b.assumptions.push_back(
            "cm-ifp: index generation overlapped with flash reads "
            "(energy already in e_bit_add)");
    } else {
        const double pages = s.passes * ceil_div_d(s.db_bytes,
                                                   static_cast<double>(
                                                       cfg.ssd.page_bytes));
        b.index_gen.latency_ns =
            pages * (cfg.nand.t_index_gen_ns - cfg.nand.t_read_ns);
    }
    return b;
}

}  // namespace

CostBreakdown cost(SystemKind system, const Workload& w,
                   const SystemConfigs& cfg) {
    switch (system) {
        case SystemKind::CmSw: return cost_cm_sw(w, cfg);
        case SystemKind::CmPum: return cost_cm_pum(w, cfg);
        case SystemKind::CmPumSsd: return cost_cm_pum_ssd(w, cfg);
        case SystemKind::CmIfp: return cost_cm_ifp(w, cfg);
    }
    throw std::invalid_argument("cost: unknown system");
}

std::vector<SweepRow> sweep(const std::vector<Workload>& workloads,
                            const std::vector<SystemKind>& systems,
                            const SystemConfigs& cfg) {
    std::vector<SweepRow> rows;
    rows.reserve(workloads.size() * systems.size());
    for (const auto& w : workloads) {
        const double sw_latency = cost(SystemKind::CmSw, w, cfg).total_latency_ns();
        for (SystemKind sys : systems) {
            const CostBreakdown b = cost(sys, w, cfg);
            SweepRow row;
            row.system = sys;
            row.workload = w;
            row.latency_ns = b.total_latency_ns();
            row.energy_nj = b.total_energy_nj();
            row.speedup_vs_cmsw =
                row.latency_ns > 0.0 ? sw_latency / row.latency_ns : 0.0;
            rows.push_back(row);
        }
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "system,db_bytes,query_bits,num_queries,latency_ns,energy_nj,"
          "speedup_vs_cmsw\n";
    os.precision(6);
    os << std::fixed;
    for (const auto& r : rows) {
        os << system_name(r.system) << ',' << r.workload.encrypted_db_bytes
           << ',' << r.workload.query_bits << ',' << r.workload.num_queries
           << ',' << r.latency_ns << ',' << r.energy_nj << ','
           << r.speedup_vs_cmsw << '\n';
    }
    return os.str();
}

std::vector<Workload> dna_preset() {
    std::vector<Workload> out;
    for (std::uint64_t y : {16, 32, 64, 128, 256})
        out.push_back(Workload{128'000'000'000ull, y, 1, y});
    return out;
}

std::vector<Workload> dbsearch_preset() {
    std::vector<Workload> out;
    for (std::uint64_t gb : {8, 16, 32, 64, 128})
        out.push_back(Workload{gb * 1'000'000'000ull, 16, 1000, 16});
    return out;
}

}  // namespace ciphermatch::cost
