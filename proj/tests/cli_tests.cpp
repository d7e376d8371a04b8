// End-to-end checks of the command-line tool. argv[1] is the path to the
// binary; commands run through popen with stderr silenced.

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <nlohmann/json.hpp>

using nlohmann::json;

namespace {

int g_failures = 0;

#define CHECK_MSG(cond, msg)                                                                       \
    do {                                                                                           \
        if (!(cond)) {                                                                             \
            std::cerr << "FAIL " << __FILE__ << ":" << __LINE__ << "  " << msg << "\n";            \
            ++g_failures;                                                                          \
        }                                                                                          \
    } while (0)

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& cmd) {
    RunResult r;
    FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
    if (!pipe) {
        r.exit_code = -1;
        return r;
    }
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_tests <path-to-calabi-binary>\n";
        return 1;
    }
    const std::string bin = argv[1];

    // paraboloid: all-zero invariants, case C0
    {
        RunResult r = run(bin + " invariants paraboloid:2 --random 5 --seed 1");
        CHECK_MSG(r.exit_code == 0, "paraboloid invariants exit code " << r.exit_code);
        json j = json::parse(r.out);
        CHECK_MSG(j.at("points").size() == 5, "expected 5 records");
        for (const auto& rec : j.at("points")) {
            CHECK_MSG(rec.at("J").get<double>() == 0.0, "paraboloid J");
            CHECK_MSG(rec.at("case").get<std::string>() == "C0", "paraboloid case");
        }
        CHECK_MSG(j.at("summary").at("flat").get<bool>(), "paraboloid flat flag");
        CHECK_MSG(j.at("summary").at("parallel").get<bool>(), "paraboloid parallel flag");
        CHECK_MSG(j.at("summary").at("extremal").get<bool>(), "paraboloid extremal flag");
    }

    // logcone: R = -2 at every record
    {
        RunResult r = run(bin + " invariants logcone:1 --random 10 --seed 1");
        CHECK_MSG(r.exit_code == 0, "logcone invariants exit code");
        json j = json::parse(r.out);
        CHECK_MSG(j.at("points").size() == 10, "expected 10 records");
        for (const auto& rec : j.at("points")) {
            CHECK_MSG(std::abs(rec.at("R").get<double>() + 2.0) < 1e-8, "logcone R");
            CHECK_MSG(rec.at("case").get<std::string>() == "C2", "logcone case");
        }
        CHECK_MSG(!j.at("summary").at("flat").get<bool>(), "logcone flat flag");
    }

    // q:1,1:2 has J = 1 per point
    {
        RunResult r = run(bin + " invariants q:1,1:2 --random 10 --seed 1");
        CHECK_MSG(r.exit_code == 0, "q invariants exit code");
        json j = json::parse(r.out);
        for (const auto& rec : j.at("points"))
            CHECK_MSG(std::abs(rec.at("J").get<double>() - 1.0) < 1e-8, "q J value");
    }

    // CALABI_TOL is the tolerance fallback; --tol still wins
    {
        RunResult r = run("CALABI_TOL=1e-3 " + bin + " invariants q:1:2 --random 2 --seed 1");
        CHECK_MSG(json::parse(r.out).at("tolerance").get<double>() == 1e-3, "env tolerance");
        RunResult r2 =
            run("CALABI_TOL=1e-3 " + bin + " invariants q:1:2 --random 2 --seed 1 --tol 1e-6");
        CHECK_MSG(json::parse(r2.out).at("tolerance").get<double>() == 1e-6, "flag beats env");
    }

    // reports are byte-stable under a fixed seed
    {
        RunResult a = run(bin + " invariants q:2,3:3 --random 7 --seed 9");
        RunResult b = run(bin + " invariants q:2,3:3 --random 7 --seed 9");
        CHECK_MSG(a.out == b.out, "byte stability");
        RunResult c = run(bin + " invariants q:2,3:3 --random 7 --seed 10");
        CHECK_MSG(a.out != c.out, "seed changes the samples");
    }

    // every numeric field is finite (JSON would render NaN/Inf as null), and
    // a spectrum that fits no case pattern reports a null label
    {
        RunResult r = run(bin +
                          " invariants \"x1^4+0.5*x1^2+0.5*x2^2+0.3*x1*x2^2\" --random 5 --seed 3");
        CHECK_MSG(r.exit_code == 0, "DSL invariants exit code");
        json j = json::parse(r.out);
        std::function<void(const json&)> walk = [&](const json& node) {
            CHECK_MSG(!node.is_null(), "null leaked into report");
            if (node.is_array() || node.is_object())
                for (const auto& v : node)
                    walk(v);
        };
        bool saw_null_case = false;
        for (const auto& rec : j.at("points")) {
            for (const auto& key : {"J", "R", "T_norm2", "covA_norm", "riem_norm"})
                walk(rec.at(key));
            saw_null_case = saw_null_case || rec.at("case").is_null();
        }
        CHECK_MSG(saw_null_case, "non-parallel surface still classified");
        CHECK_MSG(!j.at("summary").at("parallel").get<bool>(), "generic quartic is not parallel");
    }

    // --dim widens a DSL expression; a variable that never appears makes the
    // Hessian singular, so every sample lands in the rejected list. Leading
    // minus signs need the conventional "--" separator.
    {
        RunResult r =
            run(bin + " invariants --dim 3 --random 2 --seed 1 -- \"-ln(x1)+0.5*x2^2\"");
        CHECK_MSG(r.exit_code == 0, "dim override exit code " << r.exit_code);
        json j = json::parse(r.out);
        CHECK_MSG(j.at("points").empty(), "degenerate metric must reject");
        CHECK_MSG(j.at("rejected").size() == 2, "rejected count");
        CHECK_MSG(j.at("rejected")[0].at("x").size() == 3, "dim override point size");

        RunResult r2 =
            run(bin + " invariants --random 2 --seed 1 -- \"-ln(x1)-ln(x2)+0.5*x3^2\"");
        json j2 = json::parse(r2.out);
        CHECK_MSG(j2.at("points").size() == 2, "leading-minus DSL accepted");
        CHECK_MSG(j2.at("points")[0].at("mu").size() == 3, "spectrum size");
    }

    // classify emits spectra
    {
        RunResult r = run(bin + " classify logcone:1 --random 3 --seed 2");
        CHECK_MSG(r.exit_code == 0, "classify exit code");
        json j = json::parse(r.out);
        for (const auto& rec : j.at("points")) {
            CHECK_MSG(rec.at("mu").size() == 3, "classify spectrum length");
            CHECK_MSG(std::abs(rec.at("mu")[0].get<double>() - std::sqrt(2.0)) < 1e-6,
                      "classify mu1");
        }
    }

    // domain rejections are reported, not fatal
    {
        std::ofstream f("/tmp/calabi_cli_points.json");
        f << "{\"points\": [[1.0, 1.0], [-1.0, 1.0]]}";
        f.close();
        RunResult r = run(bin + " invariants q:1:2 --points /tmp/calabi_cli_points.json");
        CHECK_MSG(r.exit_code == 0, "rejection run exit code");
        json j = json::parse(r.out);
        CHECK_MSG(j.at("points").size() == 1, "one accepted point");
        CHECK_MSG(j.at("rejected").size() == 1, "one rejected point");
    }

    // verify-catalog: single surface passes, bad parameter exits 2
    {
        RunResult r = run(bin + " verify-catalog logcone:1 --random 25 --seed 1");
        CHECK_MSG(r.exit_code == 0, "verify-catalog logcone exit code " << r.exit_code);
        json j = json::parse(r.out);
        CHECK_MSG(j.at("pass").get<bool>(), "verify-catalog verdict");
        bool saw_param = false;
        for (const auto& chk : j.at("results")[0].at("checks"))
            if (chk.at("name") == "parametrization_graph") {
                saw_param = true;
                CHECK_MSG(chk.at("worst").get<double>() < 1e-10, "parametrization residual");
            }
        CHECK_MSG(saw_param, "parametrization check present");

        RunResult all = run(bin + " verify-catalog --all --random 40");
        CHECK_MSG(all.exit_code == 0, "verify-catalog --all exit code " << all.exit_code);
        CHECK_MSG(json::parse(all.out).at("results").size() == 10, "catalog size");

        CHECK_MSG(run(bin + " verify-catalog q:-1:2").exit_code == 2, "invalid parameter exit");
        CHECK_MSG(run(bin + " verify-catalog nosuch:1").exit_code == 2, "unknown id exit");
        CHECK_MSG(run(bin + " invariants \"ln(\"").exit_code == 2, "syntax error exit");
    }

    // reconstruct: recovered c and round trip
    {
        RunResult r = run(bin + " reconstruct --a 1 --n 2");
        CHECK_MSG(r.exit_code == 0, "reconstruct exit code");
        json j = json::parse(r.out);
        CHECK_MSG(std::abs(j.at("c")[0].get<double>() - 1.0) < 1e-12, "recovered c");
        CHECK_MSG(j.at("integration_deviation").get<double>() < 1e-9, "integration residual");
        CHECK_MSG(j.at("roundtrip").at("max_deviation").get<double>() < 1e-7, "roundtrip");

        RunResult r2 = run(bin + " reconstruct --a \"\" --n 3");
        json j2 = json::parse(r2.out);
        CHECK_MSG(j2.at("surface").get<std::string>() == "paraboloid:3", "empty data paraboloid");

        RunResult r3 = run(bin + " reconstruct --a 2,1 --n 3");
        json j3 = json::parse(r3.out);
        CHECK_MSG(std::abs(j3.at("c")[0].get<double>() - 0.25) < 1e-12, "c = 1/a^2");
        CHECK_MSG(std::abs(j3.at("c")[1].get<double>() - 1.0) < 1e-12, "c = 1/a^2");

        CHECK_MSG(run(bin + " reconstruct --a -1 --n 2").exit_code == 2, "negative data exit");
    }

    // diag subcommand on a commuting pair with a shared eigenspace
    {
        std::ofstream f("/tmp/calabi_cli_mats.json");
        f << R"({"matrices": [[[1,0,0],[0,1,0],[0,0,2]], [[2,1,0],[1,2,0],[0,0,5]]]})";
        f.close();
        RunResult r = run(bin + " diag --file /tmp/calabi_cli_mats.json");
        CHECK_MSG(r.exit_code == 0, "diag exit code");
        json j = json::parse(r.out);
        CHECK_MSG(j.at("max_offdiag").get<double>() < 1e-9, "diag offdiagonal");
        CHECK_MSG(j.at("orthogonality").get<double>() < 1e-10, "diag orthogonality");

        std::ofstream g("/tmp/calabi_cli_bad.json");
        g << R"({"matrices": [[[1,0],[0,-1]], [[0,1],[1,0]]]})";
        g.close();
        CHECK_MSG(run(bin + " diag --file /tmp/calabi_cli_bad.json").exit_code == 2,
                  "non-commuting exit");
    }

    if (g_failures == 0)
        std::puts("cli_tests: all checks passed");
    else
        std::cerr << "cli_tests: " << g_failures << " failures\n";
    return g_failures == 0 ? 0 : 1;
}
