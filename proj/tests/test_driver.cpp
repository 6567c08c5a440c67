#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spinlattice/driver.hpp"

using namespace spinlattice;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("spinlattice_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

ErrorCode code_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::IoError;  // sentinel: nothing thrown
}

}  // namespace

TEST(Config, MinimalDefaults) {
    const RunConfig cfg = parse_config("lattice = union_jack\nwidth = 8\nheight = 8\nj1=100\nj2=100\nj3=100\nj4=100\n"
                                       "j_diag=100\nj_diag_prime=100\n");
    EXPECT_TRUE(cfg.gated);
    EXPECT_EQ(cfg.mc_params.burn_in_sweeps, 10000u);
    EXPECT_EQ(cfg.mc_params.sample_sweeps, 10000u);
    EXPECT_EQ(cfg.mc_params.seed, 20100601u);
    EXPECT_EQ(cfg.points, 50u);
    EXPECT_EQ(cfg.lattice.width, 8u);
}

TEST(Config, ChainHeightDefaultsToOne) {
    const RunConfig cfg = parse_config("lattice = chain  # ring\nwidth = 12\nj1 = 50\n");
    EXPECT_EQ(cfg.lattice.height, 1u);
}

TEST(Config, Errors) {
    try {
        parse_config("j1 = 1\nt_min = 500\nt_max = 100\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ValidationError);
        EXPECT_NE(std::string(e.what()).find("t_min < t_max"), std::string::npos);
    }
    try {
        parse_config("j1 = 1\nwolff=true\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ParseError);
        EXPECT_NE(std::string(e.what()).find("wolff"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
    EXPECT_EQ(code_of("j1 = abc\n"), ErrorCode::ParseError);
    EXPECT_EQ(code_of("j1 = 1\nj1 = 2\n"), ErrorCode::ParseError);
    EXPECT_EQ(code_of("just words\n"), ErrorCode::ParseError);
    EXPECT_EQ(code_of("lattice = chain\nwidth = 4\nj1 = 1\nj2 = 3\n"), ErrorCode::ValidationError);
    EXPECT_EQ(code_of("lattice = union_jack\nwidth = 5\n"), ErrorCode::ValidationError);
    EXPECT_EQ(code_of("points = 1\n"), ErrorCode::ValidationError);
}

TEST(Config, ShippedScenariosParse) {
    std::size_t n = 0;
    for (const auto& entry : fs::directory_iterator(SPINLATTICE_CONFIG_DIR)) {
        if (entry.path().extension() != ".cfg") continue;
        EXPECT_NO_THROW(parse_config(slurp(entry.path()))) << entry.path();
        ++n;
    }
    EXPECT_GE(n, 24u);
    for (const char* name : {"wulinferro", "wulinmeta", "wuantipredict", "wulinferrononiso", "anisoferrowork", "ujfunky",
                             "ujfunky2", "triferro", "trianti", "squareferrotrip", "squareantitrip", "antitriangle",
                             "ferro", "meta", "antiferro", "anti92150", "antia92500", "nsfunkypos_a", "nsfunkypos_b",
                             "nsfunky_a", "nsfunky_b", "metabolt", "metabolt10", "metabolt100"}) {
        EXPECT_TRUE(fs::exists(fs::path(SPINLATTICE_CONFIG_DIR) / (std::string(name) + ".cfg"))) << name;
    }
}

TEST(Config, RotatedScenarioPairs) {
    const auto load = [](const char* n) { return parse_config(slurp(fs::path(SPINLATTICE_CONFIG_DIR) / n)).couplings; };
    EXPECT_EQ(load("nsfunkypos_a.cfg").rotated_quarter_turn(), load("nsfunkypos_b.cfg"));
    EXPECT_EQ(load("nsfunky_a.cfg").rotated_quarter_turn(), load("nsfunky_b.cfg"));
    EXPECT_EQ(load("ujfunky.cfg").rotated_quarter_turn(), load("ujfunky2.cfg"));
}

TEST(Csv, SingleRecordIsTwoLines) {
    SweepRecord r;
    r.temp = 100.0;
    r.engine = Engine::Exact;
    r.m_sigma = 0.5;
    const std::string text = format_csv({r});
    EXPECT_EQ(text, std::string(kCsvHeader) + "\n100,exact,0.5,,,,,,,\n");
}

TEST(Csv, RoundTrip) {
    std::vector<SweepRecord> recs(3);
    recs[0].temp = 12.5;
    recs[0].engine = Engine::Mc;
    recs[0].m_all = -0.123456789;
    recs[0].abs_m_all = 0.75;
    recs[0].energy_per_site = -199.25;
    recs[0].std_error = 1.5e-3;
    recs[1].temp = 300;
    recs[1].engine = Engine::MeanField;
    recs[1].m_sigma = 1e-12;
    recs[1].flags = {"NotConverged"};
    recs[2].temp = 400;
    recs[2].engine = Engine::Exact;
    recs[2].flags = {"Ungated", "GateFailed", "OutOfRange"};
    const std::string text = format_csv(recs);
    EXPECT_NE(text.find("Ungated;GateFailed;OutOfRange"), std::string::npos);
    EXPECT_EQ(text.find('\r'), std::string::npos);
    EXPECT_EQ(parse_csv(text), recs);

    recs[0].deviation = 0.0125;
    EXPECT_EQ(parse_csv(format_csv(recs)), recs);

    const fs::path dir = scratch_dir("csv");
    write_csv(recs, dir / "out.csv");
    EXPECT_EQ(read_csv(dir / "out.csv"), recs);
    EXPECT_THROW(write_csv({}, dir / "empty.csv"), Error);
    EXPECT_THROW(write_csv(recs, dir / "missing" / "x.csv"), Error);
}

TEST(Csv, NineSignificantDigits) {
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333");
    EXPECT_EQ(format_number(226.918531421302), "226.918531");
}

TEST(Execute, ClassifyPrintsLabel) {
    RunConfig cfg;
    cfg.command = Command::Classify;
    cfg.lattice = LatticeSpec::grid(LatticeKind::UnionJack, 4, 4);
    cfg.couplings = CouplingSet::union_jack_symmetric(100, 100);
    std::ostringstream out;
    const ExecResult r = execute(cfg, out);
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(out.str(), "Ferromagnetic\n");
}

TEST(Execute, CriticalOnReentrantSet) {
    RunConfig cfg = parse_config(slurp(fs::path(SPINLATTICE_CONFIG_DIR) / "wulinferrononiso.cfg"));
    cfg.command = Command::Critical;
    std::ostringstream out;
    const ExecResult r = execute(cfg, out);
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.critical.count(RootKind::OmegaRoot), 3u);
    EXPECT_GE(r.critical.count(RootKind::VaksTc), 1u);
    EXPECT_GE(r.critical.count(RootKind::VaksTcStar), 1u);
    const std::string text = out.str();
    EXPECT_EQ(text.rfind("temp_K,kind,gamma_index\n", 0), 0u);
    EXPECT_NE(text.find(",OmegaRoot,2"), std::string::npos);
}

TEST(Execute, CompareSmallSquareAgainstEnumeration) {
    RunConfig cfg = parse_config(slurp(fs::path(SPINLATTICE_CONFIG_DIR) / "desk_square_4x4.cfg"));
    cfg.command = Command::Compare;
    std::ostringstream out;
    const ExecResult r = execute(cfg, out);
    ASSERT_EQ(r.exit_code, 0) << r.message;
    ASSERT_EQ(r.records.size(), 2 * cfg.points);
    for (std::size_t i = 0; i < cfg.points; ++i) {
        const auto& ref = r.records[i];
        const auto& mc = r.records[cfg.points + i];
        EXPECT_EQ(ref.engine, Engine::Exact);
        EXPECT_EQ(mc.engine, Engine::Mc);
        EXPECT_EQ(ref.temp, mc.temp);
        ASSERT_TRUE(mc.deviation && mc.std_error);
        EXPECT_LT(std::fabs(*mc.deviation), 4.0 * *mc.std_error) << mc.temp;
    }
    EXPECT_NE(out.str().find(",deviation\n"), std::string::npos);
}

TEST(Execute, WritesCsvAndSidecar) {
    const fs::path dir = scratch_dir("exec");
    RunConfig cfg;
    cfg.command = Command::Predict;
    cfg.lattice = LatticeSpec::grid(LatticeKind::UnionJack, 4, 4);
    cfg.couplings = CouplingSet::union_jack_symmetric(100, 100);
    cfg.points = 5;
    cfg.output_path = (dir / "p.csv").string();
    std::ostringstream out;
    ASSERT_EQ(execute(cfg, out).exit_code, 0);
    EXPECT_TRUE(out.str().empty());
    EXPECT_EQ(read_csv(dir / "p.csv").size(), 5u);
    const auto meta = nlohmann::json::parse(slurp(dir / "p.csv.meta.json"));
    EXPECT_EQ(meta["status"], "ok");
    EXPECT_EQ(meta["couplings"]["j1"], 100.0);
    EXPECT_EQ(meta["mc"]["seed"], 20100601u);
    EXPECT_TRUE(meta.contains("wall_time_s"));
    EXPECT_FALSE(fs::exists(dir / "p.csv.tmp"));
}

TEST(Execute, EngineErrorGoesToSidecar) {
    const fs::path dir = scratch_dir("err");
    RunConfig cfg;
    cfg.command = Command::Oracle;
    cfg.lattice = LatticeSpec::grid(LatticeKind::Square, 6, 6);
    cfg.couplings = CouplingSet::square(100, 100);
    cfg.output_path = (dir / "o.csv").string();
    std::ostringstream out;
    const ExecResult r = execute(cfg, out);
    EXPECT_NE(r.exit_code, 0);
    const auto meta = nlohmann::json::parse(slurp(dir / "o.csv.meta.json"));
    EXPECT_EQ(meta["status"], "error");
    EXPECT_EQ(meta["error"]["code"], "TooLarge");
    EXPECT_FALSE(fs::exists(dir / "o.csv"));
}

TEST(Execute, PredictFlagsUngatedRows) {
    RunConfig cfg = parse_config(slurp(fs::path(SPINLATTICE_CONFIG_DIR) / "ujfunky2.cfg"));
    cfg.command = Command::Predict;
    std::ostringstream out;
    const ExecResult r = execute(cfg, out);
    ASSERT_EQ(r.exit_code, 0) << r.message;
    for (const auto& rec : r.records) EXPECT_EQ(rec.flags.front(), "Ungated");
}

TEST(Execute, MeanFieldNeedsIsotropicCouplings) {
    RunConfig cfg = parse_config(slurp(fs::path(SPINLATTICE_CONFIG_DIR) / "ujfunky.cfg"));
    cfg.command = Command::MeanField;
    std::ostringstream out;
    EXPECT_EQ(execute(cfg, out).exit_code, 1);

    cfg = parse_config(slurp(fs::path(SPINLATTICE_CONFIG_DIR) / "ferro.cfg"));
    cfg.command = Command::MeanField;
    const ExecResult r = execute(cfg, out);
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.records.size(), cfg.points);
}

TEST(Execute, SimulateIsDeterministic) {
    RunConfig cfg;
    cfg.command = Command::Simulate;
    cfg.lattice = LatticeSpec::grid(LatticeKind::Triangular, 8, 8);
    cfg.couplings = CouplingSet::triangular(100, 100, 100);
    cfg.points = 4;
    cfg.mc_params.burn_in_sweeps = 100;
    cfg.mc_params.sample_sweeps = 200;
    std::ostringstream a, b;
    execute(cfg, a, 1);
    execute(cfg, b, 3);
    EXPECT_EQ(a.str(), b.str());
    cfg.mc_params.seed = 5;
    std::ostringstream c;
    execute(cfg, c, 1);
    EXPECT_NE(a.str(), c.str());
}
