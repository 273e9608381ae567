"""
Abstractive rewrite through a chat-completions endpoint
=======================================================

An in-process mock server stands in for the model so this runs offline.
Point ``ChatClient`` at a real deployment (or set LLM_URL) to use a model.
"""

from importlib import resources

from hybridsum import ChatClient, RunConfig, collapse_repetition, load_corpus, run_pipeline
from hybridsum.testing import MockChatServer

corpus = load_corpus(str(resources.files("hybridsum") / "data" / "mini"))

# A model that stutters; the cleanup step removes the repetition
with MockChatServer("fixed", reply="Giá xăng tăng tăng tăng 500 đồng. Giá xăng tăng 500 đồng.") as srv:
    result = run_pipeline(corpus, RunConfig(seed=42, llm=ChatClient(srv.url)))
    print("request body:", srv.requests[0]["messages"][1]["content"][:80], "...")

for cid, outcome in result.outcomes.items():
    print(cid)
    print("  raw:    ", outcome.abstractive.raw_text)
    print("  cleaned:", outcome.text)

print(collapse_repetition("tốt tốt tốt rồi"))
