"""Regenerates trec_eval_{run,qrels}.txt and trec_eval_expected.tsv.

Expected values come from pytrec_eval (trec_eval 9.x compiled as a Python
module). Scores are distinct within each query so trec_eval's internal
re-sorting agrees with the run order. MRR@10 is trec_eval's recip_rank on the
run truncated to 10 documents.
"""
import numpy as np
import pytrec_eval

rng = np.random.default_rng(7)
docs = [f"D{i:03d}" for i in range(60)]
qrels, run = {}, {}
for q in range(10):
    qid = f"Q{q:02d}"
    judged = rng.choice(docs, size=12, replace=False)
    grades = rng.integers(0, 4, size=12)
    if q == 3:
        grades[:] = 0  # no relevant docs at all
    qrels[qid] = {d: int(g) for d, g in zip(judged, grades)}
    retrieved = rng.choice(docs, size=30, replace=False)
    if q == 5:  # relevant docs absent from the run
        retrieved = [d for d in docs if qrels[qid].get(d, 0) == 0][:30]
    scores = rng.permutation(np.arange(30)) * 0.37 + rng.uniform(0, 0.1)
    run[qid] = {d: round(float(s), 6) for d, s in zip(retrieved, scores)}

with open("trec_eval_qrels.txt", "w") as f:
    for qid, j in sorted(qrels.items()):
        for d, g in sorted(j.items()):
            f.write(f"{qid} 0 {d} {g}\n")
with open("trec_eval_run.txt", "w") as f:
    for qid, r in sorted(run.items()):
        ranked = sorted(r.items(), key=lambda x: (-x[1], x[0]))
        for rank, (d, s) in enumerate(ranked, 1):
            f.write(f"{qid} Q0 {d} {rank} {s:.6f} fixture\n")

full = pytrec_eval.RelevanceEvaluator(qrels, {"ndcg_cut.10", "recall.1000", "recall.10"})
res = full.evaluate(run)
top10 = {q: dict(sorted(r.items(), key=lambda x: (-x[1], x[0]))[:10]) for q, r in run.items()}
rr = pytrec_eval.RelevanceEvaluator(qrels, {"recip_rank"}).evaluate(top10)

with open("trec_eval_expected.tsv", "w") as f:
    f.write("# qid\tndcg_cut_10\trecip_rank@10\trecall_10\trecall_1000 (pytrec_eval, linear gain)\n")
    for qid in sorted(run):
        f.write(f"{qid}\t{res[qid]['ndcg_cut_10']:.6f}\t{rr[qid]['recip_rank']:.6f}\t"
                f"{res[qid]['recall_10']:.6f}\t{res[qid]['recall_1000']:.6f}\n")
