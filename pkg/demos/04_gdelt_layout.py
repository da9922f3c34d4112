"""
Reading GDELT v2 mentions files
===============================

The parser only needs three columns of the mentions table: the event id
(column 0), the mention time (column 2, yyyyMMddHHmmss) and the source
domain (column 4).  Malformed lines are counted and skipped unless strict.
"""

import io

from sourcebias.ingest import GDELT_MENTIONS, parse_mentions

sample = (
    "600000001\t20161001000000\t20161001081500\t1\tnews.example\thttp://news.example/a\n"
    "600000001\t20161001000000\t20161001091500\t1\tdaily.example\thttp://daily.example/b\n"
    "broken line\n"
    "\n"
    "600000002\t20161001000000\tnot-a-time\t1\tnews.example\thttp://news.example/c\n"
)
result = parse_mentions(io.BytesIO(sample.encode()), GDELT_MENTIONS)
for r in result:
    print(r.event_id, r.source_name, r.mention_time.isoformat())
print("skipped lines:", result.skipped)

###############################################################################
# The same steps from the shell, on real files:
#
#   sourcebias ingest --input 2016100*.mentions.CSV --format gdelt \
#       --start 2016-10-01T00:00:00Z --end 2016-10-08T00:00:00Z --out week1/
#   sourcebias split --dataset week1/ --seed 1 --out week1-split/
#   sourcebias train --dataset week1-split/ --k 20 --alpha 0.1 --lambda 0.01 \
#       --epochs 50 --seed 1 --out week1-model/
#   sourcebias eval --model week1-model/ --split week1-split/ --baselines popularity,knn
