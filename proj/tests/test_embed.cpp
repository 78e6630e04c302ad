#include <doctest.h>

#include <thread>

#include "keynmf/embed.hpp"
#include "keynmf/matrix_io.hpp"
#include "test_util.hpp"

#include <httplib.h>
#include <json.hpp>

using namespace keynmf;

TEST_CASE("cosine similarity basics") {
    Eigen::Vector2d e1(1, 0), e2(0, 1), diag(1, 1);
    CHECK(cosine_similarity(e1, e1) == doctest::Approx(1.0));
    CHECK(cosine_similarity(e1, e2) == doctest::Approx(0.0));
    // 1/sqrt(2), hand value
    CHECK(std::abs(cosine_similarity(diag, e1) - 0.70710678118654752) < 1e-12);
    CHECK_THROWS_AS(cosine_similarity(e1, Eigen::Vector2d(0, 0)), Error);
    CHECK_THROWS_AS(cosine_similarity(e1, Eigen::Vector3d(1, 0, 0)), Error);
}

TEST_CASE("cosine similarity symmetry and positive-scale invariance") {
    SplitMix64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        int dim = 2 + static_cast<int>(rng.next_u64() % 10);
        auto a = test::random_unit_vector(rng, dim);
        auto b = test::random_unit_vector(rng, dim);
        CHECK(cosine_similarity(a, b) == cosine_similarity(b, a));
        double alpha = rng.next_uniform() * 10 + 0.01;
        CHECK(std::abs(cosine_similarity(alpha * a, b) - cosine_similarity(a, b)) < 1e-12);
    }
}

TEST_CASE("test embedder is a pure unit-norm function of (seed, text)") {
    TestEmbedder a(42, 16), b(42, 16), other(43, 16);
    auto va = embed_batch(a, {"北京", "北京", "news"});
    auto vb = embed_batch(b, {"北京", "news", "北京"});
    CHECK(va[0] == va[1]);
    CHECK(va[0] == vb[0]);
    CHECK(va[0] == vb[2]);
    CHECK(va[2] == vb[1]);
    CHECK(va[0] != other.embed({"北京"})[0]);
    for (const auto& v : va) {
        CHECK(v.size() == 16);
        CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("embed_batch validates inputs") {
    TestEmbedder provider(1, 8);
    CHECK_THROWS_AS(embed_batch(provider, {}), Error);
    CHECK_THROWS_AS(embed_batch(provider, {"ok", ""}), Error);
}

TEST_CASE("precomputed store returns stored vectors bit-exactly") {
    test::TempDir dir("store");
    DenseMatrix m(2, 3);
    m << 0.25, -1.5, 3.0, 0.125, 2.5, -0.75;
    write_dense(dir.path() / "vecs.knmf", m);
    write_ids(dir.path() / "vecs.knmf.ids", {"北京", "news"});

    auto store = load_precomputed_store(dir.path() / "vecs.knmf", dir.path() / "vecs.knmf.ids");
    auto v = embed_batch(*store, {"北京"});
    CHECK(v[0] == Eigen::Vector3d(0.25, -1.5, 3.0));
    CHECK_THROWS_WITH_AS(store->embed({"missing"}), doctest::Contains("missing"), Error);
}

TEST_CASE("http provider decodes the wire format") {
    httplib::Server server;
    int requests = 0;
    server.Post("/embed", [&](const httplib::Request& req, httplib::Response& res) {
        ++requests;
        auto body = nlohmann::json::parse(req.body);
        nlohmann::json out;
        out["embeddings"] = nlohmann::json::array();
        for (std::size_t i = 0; i < body["texts"].size(); ++i)
            out["embeddings"].push_back({0.6, 0.8});
        res.set_content(out.dump(), "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    std::thread server_thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    {
        HttpEmbedder provider("http://127.0.0.1:" + std::to_string(port), 2);
        auto vecs = embed_batch(provider, {"a", "b", "c"});
        CHECK(vecs.size() == 3);
        CHECK(vecs[0] == Eigen::Vector2d(0.6, 0.8));
        CHECK(provider.dimension() == 2);
        CHECK(requests == 2);  // batch size 2 -> two requests
    }
    server.stop();
    server_thread.join();
}

TEST_CASE("http provider reports failure with retry count") {
    HttpEmbedder provider("http://127.0.0.1:1", 64, 2);  // nothing listens here
    CHECK_THROWS_WITH_AS(provider.embed({"a"}), doctest::Contains("3 attempts"), Error);
}

TEST_CASE("cached provider serves hits from disk and recomputes misses") {
    test::TempDir dir("cache");
    auto inner = std::make_shared<TestEmbedder>(5, 8);
    CachedProvider cached(inner, dir.path());
    auto first = cached.embed({"alpha", "beta"});
    auto again = cached.embed({"beta", "alpha", "gamma"});
    CHECK(again[0] == first[1]);
    CHECK(again[1] == first[0]);
    CHECK(again[2] == inner->embed({"gamma"})[0]);

    // a fresh instance over the same directory reads the same bytes back
    CachedProvider reopened(std::make_shared<TestEmbedder>(5, 8), dir.path());
    CHECK(reopened.embed({"alpha"})[0] == first[0]);
}
