/*
 * Copyright 2026 The aerint Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;

struct Run {
    int status = -1;
    std::string out;
};

// Runs the CLI through the shell with stderr folded into stdout.
Run cli(const std::string& args)
{
    const std::string cmd = std::string("'") + AERINT_CLI_PATH + "' " + args + " 2>&1";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    for (std::size_t got; (got = std::fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, got);
    const int raw = pclose(p);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::path(AERINT_TEST_TMP) / "cli";
    fs::create_directories(dir);
    return dir / name;
}

void write_file(const fs::path& p, const std::string& text)
{
    std::ofstream(p) << text;
}

std::string read_file(const fs::path& p)
{
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("arb run prints the config header and a sparse row")
{
    const auto r = cli("arb run --arch hier-tree --n 64 --mode sparse --trials 1");
    CHECK(r.status == 0);
    CHECK(r.out.rfind("# config: ", 0) == 0);
    CHECK(r.out.find("# config_hash: ") != std::string::npos);
    CHECK(r.out.find("hier-tree,64,sparse,6,6,0,1,1") != std::string::npos);
}

TEST_CASE("flags and config files describe the same run")
{
    const auto file = scratch("arb.json");
    write_file(file, R"({"arch":"token-ring","n":16,"mode":"burst","trials":5})");
    const auto a = cli("arb run --config '" + file.string() + "'");
    const auto b = cli("arb run --arch token-ring --n 16 --mode burst --trials 5");
    CHECK(a.status == 0);
    CHECK(a.out == b.out);
    // Flags win over the file.
    const auto c = cli("arb run --config '" + file.string() + "' --n 64");
    CHECK(c.out.find("token-ring,64,burst,64") != std::string::npos);
}

TEST_CASE("json output parses and carries the hash")
{
    const auto r = cli("arb run --arch hier-tree --n 64 --mode burst --format json");
    REQUIRE(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("config_hash").get<std::string>().size() == 16);
    CHECK(j.at("violations").empty());
    CHECK(j.at("points").size() == 1);
}

TEST_CASE("exit code 2 for invalid configuration")
{
    const auto arch = cli("arb run --arch mesh");
    CHECK(arch.status == 2);
    CHECK(arch.out.find("hier-tree") != std::string::npos);  // lists the allowed names
    CHECK(cli("arb run --arch hier-tree --n 48").status == 2);
    CHECK(cli("cam search --completion sync").status == 2);
    CHECK(cli("arb run --mode storm").status == 2);
    CHECK(cli("arb run --bogus-flag").status == 2);
    const auto file = scratch("unknown.json");
    write_file(file, R"({"arch":"hier-tree","colour":"red"})");
    const auto r = cli("arb run --config '" + file.string() + "'");
    CHECK(r.status == 2);
    CHECK(r.out.find("colour") != std::string::npos);
    write_file(file, "{not json");
    CHECK(cli("arb run --config '" + file.string() + "'").status == 2);
}

TEST_CASE("exit code 4 for I/O failures")
{
    CHECK(cli("arb run --config /nonexistent/aerint.json").status == 4);
    CHECK(cli("arb run --n 64 --out /nonexistent/dir/out.csv").status == 4);
    CHECK(cli("check /nonexistent/trace.csv").status == 4);
}

TEST_CASE("--out writes the file instead of stdout")
{
    const auto out = scratch("tables.csv");
    fs::remove(out);
    const auto r = cli("arb tables --trials 200 --out '" + out.string() + "'");
    CHECK(r.status == 0);
    CHECK(r.out.empty());
    const auto text = read_file(out);
    CHECK(text.find("table,arch,formula,n,analytic") != std::string::npos);
}

TEST_CASE("cam search is deterministic")
{
    const std::string args = "cam search --entries 16 --width 11 --completion cscd --feedback --speculative 3 --seed 1";
    const auto a = cli(args);
    const auto b = cli(args);
    CHECK(a.status == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("search,key,matches,cycle_time,energy,false_timing") != std::string::npos);
}

TEST_CASE("traces pass the checker; a corrupted trace is flagged")
{
    const auto trace = scratch("arb_trace.csv");
    CHECK(cli("arb run --arch hier-tree --n 64 --mode burst --trace '" + trace.string() + "'").status == 0);
    const auto ok = cli("check '" + trace.string() + "'");
    CHECK(ok.status == 0);
    CHECK(ok.out == "[]\n");

    const auto cam = scratch("cam_trace.csv");
    CHECK(cli("cam search --entries 16 --trace '" + cam.string() + "'").status == 0);
    CHECK(cli("check '" + cam.string() + "'").status == 0);

    const auto bad = scratch("bad_trace.csv");
    write_file(bad, "time,component,signal,old,new\n5,neuron3,ack,0,1\n");
    const auto r = cli("check '" + bad.string() + "'");
    CHECK(r.status == 3);
    CHECK(r.out.find("neuron3") != std::string::npos);
}

TEST_CASE("other subcommands run")
{
    CHECK(cli("sweep --mode burst --n 16,64").status == 0);
    CHECK(cli("cam report --entries 16 --trials 20").status == 0);
    const auto d = cli("demo --n 16 --entries 16");
    CHECK(d.status == 0);
    CHECK(d.out.find("neuron,address,t_request,t_output,matches,cam_cycle") != std::string::npos);
    CHECK(cli("--help").status == 0);
}

}
