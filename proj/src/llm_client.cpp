#include "groupcast/llm_client.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "groupcast/context.hpp"
#include "groupcast/errors.hpp"
#include "groupcast/response.hpp"

namespace groupcast {

using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

void validate(const CompletionRequest& req) {
    if (req.prompt.empty()) throw ContractError("completion request: empty prompt");
    if (req.max_new_tokens < 1) throw ContractError("completion request: max_new_tokens must be >= 1");
    if (!(req.temperature >= 0.0)) throw ContractError("completion request: temperature must be >= 0");
}

std::string truncate_at_stop(std::string text, const std::vector<std::string>& stops) {
    std::size_t cut = text.size();
    for (const auto& s : stops) {
        if (s.empty()) continue;
        cut = std::min(cut, text.find(s));
    }
    text.resize(cut);
    return text;
}

// ---- HTTP

HttpCompletionClient::HttpCompletionClient(EndpointConfig cfg) : cfg_(std::move(cfg)), jitter_(cfg_.seed) {
    if (cfg_.timeout_s <= 0.0) throw ContractError("endpoint timeout must be > 0");
    if (cfg_.max_in_flight < 1) throw ContractError("endpoint max_in_flight must be >= 1");
    if (cfg_.max_attempts < 1) throw ContractError("endpoint max_attempts must be >= 1");
    const auto scheme = cfg_.base_url.find("://");
    if (scheme == std::string::npos || cfg_.base_url.substr(0, scheme) != "http")
        throw ContractError("endpoint URL must start with http:// (TLS is not built in): " + cfg_.base_url);
    const auto slash = cfg_.base_url.find('/', scheme + 3);
    host_ = cfg_.base_url.substr(0, slash);
    std::string prefix = slash == std::string::npos ? "" : cfg_.base_url.substr(slash);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    const bool has_v1 = prefix.size() >= 3 && prefix.compare(prefix.size() - 3, 3, "/v1") == 0;
    path_ = prefix + (has_v1 ? "/completions" : "/v1/completions");
}

std::string HttpCompletionClient::describe() const { return "http " + host_ + path_ + " model=" + cfg_.model; }

double HttpCompletionClient::backoff_ms(int attempt) {
    std::lock_guard lock(mu_);
    return cfg_.backoff_base_ms * std::ldexp(1.0, attempt - 1) * (0.5 + 0.5 * unit_uniform(jitter_));
}

CompletionResult HttpCompletionClient::attempt(const CompletionRequest& req, const std::string& body,
                                               bool& transient) {
    httplib::Client cli(host_);
    const auto secs = static_cast<time_t>(cfg_.timeout_s);
    const auto usecs = static_cast<time_t>((cfg_.timeout_s - static_cast<double>(secs)) * 1e6);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);

    httplib::Request hreq;
    hreq.method = "POST";
    hreq.path = path_;
    hreq.body = body;
    hreq.set_header("Content-Type", "application/json");
    if (const char* key = std::getenv(cfg_.api_key_env.c_str()); key && *key)
        hreq.set_header("Authorization", std::string("Bearer ") + key);

    const auto t0 = Clock::now();
    std::optional<double> ttft;
    std::string received;
    hreq.response_handler = [&](const httplib::Response&) {
        if (!ttft) ttft = ms_since(t0);
        return true;
    };
    hreq.content_receiver = [&](const char* data, std::size_t len, std::uint64_t, std::uint64_t) {
        if (!ttft) ttft = ms_since(t0);
        received.append(data, len);
        return true;
    };

    auto res = cli.send(hreq);
    if (!res) {
        transient = true;
        throw TransportError("request to " + host_ + path_ + " failed: " + httplib::to_string(res.error()));
    }
    const double total = ms_since(t0);
    const int status = res->status;
    if (status == 429 || status >= 500) {
        transient = true;
        throw TransportError("endpoint returned " + std::to_string(status) + ": " + received.substr(0, 200));
    }
    if (status < 200 || status >= 300) throw EndpointError(status, received.substr(0, 500));

    const auto j = nlohmann::json::parse(received, nullptr, false);
    if (j.is_discarded() || !j.contains("choices") || !j["choices"].is_array() || j["choices"].empty() ||
        !j["choices"][0].contains("text") || !j["choices"][0]["text"].is_string())
        throw EndpointError(status, "malformed completion body: " + received.substr(0, 200));

    CompletionResult out;
    out.text = truncate_at_stop(j["choices"][0]["text"].get<std::string>(), req.stop_sequences);
    out.total_ms = total;
    out.ttft_ms = std::min(ttft.value_or(total), total);
    if (j.contains("usage") && j["usage"].is_object()) {
        const auto& u = j["usage"];
        out.tokens = TokenCounts{u.value("prompt_tokens", 0), u.value("completion_tokens", 0)};
    }
    return out;
}

CompletionResult HttpCompletionClient::complete(const CompletionRequest& req) {
    validate(req);
    nlohmann::json body = {{"model", cfg_.model},
                           {"prompt", req.prompt},
                           {"max_tokens", req.max_new_tokens},
                           {"temperature", req.temperature}};
    if (!req.stop_sequences.empty()) body["stop"] = req.stop_sequences;
    const std::string payload = body.dump();

    {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return in_flight_ < cfg_.max_in_flight; });
        ++in_flight_;
    }
    struct Release {
        HttpCompletionClient* self;
        ~Release() {
            {
                std::lock_guard lock(self->mu_);
                --self->in_flight_;
            }
            self->cv_.notify_one();
        }
    } release{this};

    std::string last_error;
    for (int a = 1; a <= cfg_.max_attempts; ++a) {
        bool transient = false;
        try {
            return attempt(req, payload, transient);
        } catch (const TransportError& e) {
            if (!transient) throw;
            last_error = e.what();
        }
        if (a < cfg_.max_attempts)
            std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(backoff_ms(a)));
    }
    throw TransportError("gave up after " + std::to_string(cfg_.max_attempts) + " attempts: " + last_error);
}

// ---- truth registry and replay store

void TruthRegistry::add(const std::string& group_id, int window, BinarySeries truth) {
    std::lock_guard lock(mu_);
    truth_.insert_or_assign({group_id, window}, std::move(truth));
}

std::optional<BinarySeries> TruthRegistry::find(const std::string& group_id, int window) const {
    std::lock_guard lock(mu_);
    const auto it = truth_.find({group_id, window});
    if (it == truth_.end()) return std::nullopt;
    return it->second;
}

std::string ReplayStore::fingerprint(std::string_view prompt) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(prompt)));
    return std::string(buf) + ":" + std::to_string(prompt.size());
}

void ReplayStore::add(std::string_view prompt, std::string reply) {
    replies_.emplace(fingerprint(prompt), std::move(reply));
}

std::optional<std::string> ReplayStore::find(std::string_view prompt) const {
    const auto it = replies_.find(fingerprint(prompt));
    if (it == replies_.end()) return std::nullopt;
    return it->second;
}

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

ReplayStore ReplayStore::load_run_dir(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw IoError("replay directory not found: " + dir.string());
    std::vector<fs::path> prompts;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file() && e.path().filename() == "prompt.txt" &&
            fs::exists(e.path().parent_path() / "response.txt"))
            prompts.push_back(e.path());
    std::sort(prompts.begin(), prompts.end());
    ReplayStore store;
    for (const auto& p : prompts) store.add(slurp(p), slurp(p.parent_path() / "response.txt"));
    return store;
}

// ---- mock

std::string flip_yes_no(const std::string& text, double p, Rng& rng, int* seen, int* flipped) {
    std::string out = text;
    int s = 0, f = 0;
    for (std::size_t k = 1; k < out.size(); ++k) {
        if (out[k - 1] != '=' || (out[k] != 'Y' && out[k] != 'N')) continue;
        ++s;
        if (bernoulli(rng, p)) {
            out[k] = out[k] == 'Y' ? 'N' : 'Y';
            ++f;
        }
    }
    if (seen) *seen = s;
    if (flipped) *flipped = f;
    return out;
}

MockCompletionClient::MockCompletionClient(Responder responder, Options opts, std::string name)
    : responder_(std::move(responder)), opts_(opts), name_(std::move(name)) {
    if (!responder_) throw ContractError("mock client needs a responder");
}

int MockCompletionClient::calls() const {
    std::lock_guard lock(mu_);
    return calls_;
}

CompletionResult MockCompletionClient::complete(const CompletionRequest& req) {
    validate(req);
    const auto t0 = Clock::now();
    {
        std::lock_guard lock(mu_);
        ++calls_;
    }
    const std::uint64_t h = fnv1a(req.prompt);
    if (opts_.error_probability > 0.0) {
        Rng rng(mix_seed({opts_.seed, h, 1}));
        if (bernoulli(rng, opts_.error_probability)) throw TransportError("injected mock failure");
    }
    if (opts_.latency_ms > 0.0) std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(opts_.latency_ms));
    std::string text = responder_(req);
    if (opts_.flip_probability > 0.0) {
        Rng rng(mix_seed({opts_.seed, h, 2}));
        text = flip_yes_no(text, opts_.flip_probability, rng);
    }
    CompletionResult out;
    out.text = truncate_at_stop(std::move(text), req.stop_sequences);
    out.total_ms = std::max(ms_since(t0), 1e-3);
    out.ttft_ms = out.total_ms;
    return out;
}

std::shared_ptr<MockCompletionClient> MockCompletionClient::scripted(std::vector<std::string> replies, Options opts) {
    struct State {
        std::mutex mu;
        std::vector<std::string> replies;
        std::size_t next = 0;
    };
    auto st = std::make_shared<State>();
    st->replies = std::move(replies);
    return std::make_shared<MockCompletionClient>(
        [st](const CompletionRequest&) {
            std::lock_guard lock(st->mu);
            if (st->next >= st->replies.size())
                throw ContractError("mock script exhausted after " + std::to_string(st->replies.size()) + " replies");
            return st->replies[st->next++];
        },
        opts, "mock:script");
}

std::shared_ptr<MockCompletionClient> MockCompletionClient::fixed(std::string text, Options opts) {
    return std::make_shared<MockCompletionClient>([text](const CompletionRequest&) { return text; }, opts,
                                                  "mock:fixed");
}

std::shared_ptr<MockCompletionClient> MockCompletionClient::echo_truth(std::shared_ptr<const TruthRegistry> registry,
                                                                       Options opts) {
    return std::make_shared<MockCompletionClient>(
        [registry](const CompletionRequest& req) {
            const auto d = read_prompt(req.prompt);
            const auto truth = registry->find(d.group_id, d.predict_window);
            if (!truth)
                throw ContractError("echo mock: no truth registered for group '" + d.group_id + "' window " +
                                    std::to_string(d.predict_window));
            return render_canonical(*truth);
        },
        opts, "mock:echo");
}

std::string context_echo_reply(std::string_view prompt) {
    const auto d = read_prompt(prompt);
    if (d.n < 2 || d.seconds < 1 || d.history.empty()) return "";
    BinarySeries s(Window{d.predict_window, 0.0, static_cast<double>(d.seconds)}, d.n, d.seconds);
    const auto& w = d.history.back().second;
    for_each_edge(d.n, true, [&](int i, int j) {
        for (Modality m : kModalities) {
            const double weight = w[modality_index(m)][static_cast<std::size_t>(i * d.n + j)];
            const auto on = std::lround(weight * d.seconds);
            for (int t = 0; t < on && t < d.seconds; ++t) s.set_raw(m, i, j, t, true);
        }
    });
    return render_canonical(s);
}

std::shared_ptr<MockCompletionClient> MockCompletionClient::context_echo(Options opts) {
    return std::make_shared<MockCompletionClient>(
        [](const CompletionRequest& req) { return context_echo_reply(req.prompt); }, opts, "mock:context");
}

std::string example_echo_reply(std::string_view prompt) {
    const auto example = prompt.find("### Example 1\n");
    if (example == std::string_view::npos) return context_echo_reply(prompt);
    const auto answer = prompt.find("Answer:\n", example);
    if (answer == std::string_view::npos) return context_echo_reply(prompt);
    const auto begin = answer + 8;
    const auto end = prompt.find("\n###", begin);
    return std::string(prompt.substr(begin, end == std::string_view::npos ? std::string_view::npos : end + 1 - begin));
}

std::shared_ptr<MockCompletionClient> MockCompletionClient::example_echo(Options opts) {
    return std::make_shared<MockCompletionClient>(
        [](const CompletionRequest& req) { return example_echo_reply(req.prompt); }, opts, "mock:example");
}

std::shared_ptr<MockCompletionClient> MockCompletionClient::replay(std::shared_ptr<const ReplayStore> store,
                                                                   Options opts) {
    return std::make_shared<MockCompletionClient>(
        [store](const CompletionRequest& req) {
            auto r = store->find(req.prompt);
            if (!r) throw ContractError("replay: no recorded reply for prompt " + ReplayStore::fingerprint(req.prompt));
            return *r;
        },
        opts, "mock:replay");
}

}  // namespace groupcast
