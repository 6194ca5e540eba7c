#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include <asep/config.hpp>

using namespace asep;

TEST(Config, LoadOverridesDefaults) {
    const std::string path = testing::TempDir() + "asep_cfg_test.cfg";
    {
        std::ofstream f(path);
        f << "# comment\nmode = simulate\np=0.25  # trailing\nL = 4\nntraj = 1000\n\n";
    }
    ExperimentConfig c;
    c.load(path);
    EXPECT_EQ(c.mode, "simulate");
    EXPECT_DOUBLE_EQ(c.p, 0.25);
    EXPECT_EQ(c.L_max, 4);
    EXPECT_EQ(c.n_traj, 1000u);
    EXPECT_NO_THROW(c.validate());
    std::remove(path.c_str());
}

TEST(Config, Errors) {
    ExperimentConfig c;
    EXPECT_THROW(c.set("bogus", "1"), ConfigError);
    EXPECT_THROW(c.set("p", "abc"), ConfigError);
    EXPECT_THROW(c.load("/nonexistent/asep.cfg"), ConfigError);
    c.p = 0.6;
    EXPECT_THROW(c.validate(), ConfigError);
    c = ExperimentConfig{};
    c.mode = "run";
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, HashTracksContent) {
    ExperimentConfig a, b;
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_EQ(a.hash().size(), 16u);
    b.seed += 1;
    EXPECT_NE(a.hash(), b.hash());
    b = a;
    b.workers = 7; // execution detail, not part of the experiment
    EXPECT_EQ(a.hash(), b.hash());
}
