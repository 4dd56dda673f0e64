#include <gtest/gtest.h>

#include <sstream>

#include "kinterp/kinterp.hpp"

using namespace kinterp;

namespace {

ExperimentConfig parse(const std::string& text)
{
    std::istringstream is(text);
    return parse_config(parse_ini(is));
}

const char* minimal = R"(
[experiment]
kind = interpolation-rates   # trailing comment
[kernel]
family = matern
d = 1
tau = 2
[points]
levels = 4, 5 6
)";

}  // namespace

TEST(Config, IniPreservesOrderAndStripsComments)
{
    std::istringstream is("; leading comment\n[b]\nz = 1\na = two words ; note\n\n[a]\nk=v\n");
    const IniDocument doc = parse_ini(is);
    ASSERT_EQ(doc.size(), 2u);
    EXPECT_EQ(doc[0].first, "b");
    EXPECT_EQ(doc[0].second[0].first, "z");
    EXPECT_EQ(doc[0].second[1].second, "two words");
    EXPECT_EQ(doc[1].second[0].second, "v");
}

TEST(Config, IniErrors)
{
    for (const char* bad : {"[a\nk=1\n", "k = 1\n", "[a]\nnovalue\n", "[a]\nk=1\nk=2\n", "[a]\n[a]\n"}) {
        std::istringstream is(bad);
        EXPECT_THROW(parse_ini(is), config_error) << bad;
    }
}

TEST(Config, Defaults)
{
    const ExperimentConfig c = parse(minimal);
    EXPECT_EQ(c.kind, ExperimentKind::InterpolationRates);
    EXPECT_EQ(c.kernel, KernelSpec::matern(1, 2));
    EXPECT_EQ(c.levels, (std::vector<int>{4, 5, 6}));
    EXPECT_EQ(c.domain.lower, std::vector<double>{0.0});
    EXPECT_EQ(c.bump_center, std::vector<double>{0.5});
    EXPECT_EQ(c.bump_half_width, std::vector<double>{0.25});
    EXPECT_EQ(c.rate_tolerance, 0.4);
    EXPECT_FALSE(c.locality);
    EXPECT_NO_THROW(validate_config(c));
    EXPECT_EQ(error_grid_nodes(c, 4), 513u);
    EXPECT_EQ(error_grid_nodes(c, 7), 1025u);
}

TEST(Config, FullDocument)
{
    const ExperimentConfig c = parse(R"(
[experiment]
kind = quasi-rates
name = q
criterion = X1
[kernel]
family = surface_spline
d = 2
m = 2
[domain]
lower = -1
upper = 1 2
[points]
levels = 1 2 3
jitter = 0.1
seed = 12345678901
[target]
center = 0 0.5
half_width = 0.5
power = 14
[norms]
sigma = 0 0.5 1
oversampling = 4
[repro]
degree = 4
locality = 3
[criteria]
rate_tolerance = 0.6
slope_min = 1
[output]
json = out/q.json
)");
    EXPECT_EQ(c.domain.upper, (std::vector<double>{1, 2}));
    EXPECT_EQ(c.domain.lower, (std::vector<double>{-1, -1}));
    EXPECT_EQ(c.seed, 12345678901u);
    EXPECT_EQ(c.bump_half_width, (std::vector<double>{0.5, 0.5}));
    EXPECT_EQ(*c.degree, 4);
    EXPECT_EQ(*c.locality, 3.0);
    EXPECT_EQ(*c.slope_min, 1.0);
    EXPECT_EQ(c.json, "out/q.json");
    EXPECT_EQ(c.echo.size(), 9u);
    EXPECT_NO_THROW(validate_config(c));
}

TEST(Config, RejectsUnknownOrMalformedEntries)
{
    const std::string base = minimal;
    EXPECT_THROW(parse(base + "[extra]\nk = 1\n"), config_error);
    EXPECT_THROW(parse(base + "[norms]\nsigmas = 1\n"), config_error);
    EXPECT_THROW(parse(base + "[norms]\nsigma = one\n"), config_error);
    EXPECT_THROW(parse(base + "[domain]\nlower = 0 0\n"), config_error);
    EXPECT_THROW(parse(base + "[domain]\nlower = 2\n"), config_error);
    EXPECT_THROW(parse(base + "[points]\n"), config_error);
    EXPECT_THROW(parse("[experiment]\nkind = nonsense\n"), config_error);
    EXPECT_THROW(parse("[experiment]\nkind = eigmin\n[kernel]\nfamily = matern\nd = 1\ntau = 0.2\n[points]\nlevels = 1 2 3\n"), config_error);
}

TEST(Config, ValidationRules)
{
    ExperimentConfig c = parse(minimal);
    c.sigmas = {0, 3};
    EXPECT_NO_THROW(validate_config(c));
    c.sigmas = {0, 3.2};  // ceil(3.2) = 4 > 3.5
    EXPECT_THROW(validate_config(c), config_error);
    c = parse(minimal);
    c.levels = {5, 4, 6};
    EXPECT_THROW(validate_config(c), config_error);
    c.levels = {4, 5};
    EXPECT_THROW(validate_config(c), config_error);
    c.levels = {4, 5, 13};
    EXPECT_THROW(validate_config(c), config_error);
    c = parse(minimal);
    c.kind = ExperimentKind::Bernstein;
    c.s_prime = 1.5;
    EXPECT_THROW(validate_config(c), config_error);
    c.s_prime = 1;
    EXPECT_NO_THROW(validate_config(c));
    c = parse(minimal);
    c.margin = 0.6;
    EXPECT_THROW(validate_config(c), config_error);
    c = parse(minimal);
    c.kind = ExperimentKind::PolyreproAudit;
    c.levels = {4};
    EXPECT_NO_THROW(validate_config(c));
}

TEST(Config, ShippedConfigsAreValid)
{
    for (int i = 1; i <= 8; ++i) {
        const std::string path = std::string(KINTERP_CONFIG_DIR) + "/ac" + std::to_string(i) + ".ini";
        EXPECT_NO_THROW(validate_config(load_config(path))) << path;
    }
    EXPECT_THROW(load_config("/nonexistent/config.ini"), io_error);
}
