"""Control sentences from tag vocabularies.

Captions are scanned for vocabulary tags (longest n-gram wins, up to three
words), optionally thinned with a seeded Bernoulli drop, and joined into a
control sentence terminated by "[SEP]" that conditions caption generation.

Run:  python3 demos/06_control_text.py
"""

from dynview.controltext import (build_control_sentence, demo_vocab, drop_tags,
                                 format_queries, parse_tags,
                                 split_control_sentence, threshold_tags)


def main():
    vocab = demo_vocab()
    caption = "A white dog lying on a sofa"
    tags = parse_tags(caption, vocab)
    print(f"caption: {caption!r}")
    print(f"tags (longest match wins): {tags}")
    sentence = build_control_sentence(tags)
    print(f"control sentence: {sentence!r}")
    print(f"split back: {split_control_sentence(sentence)}")

    print("\nseeded Bernoulli thinning (keep_prob=0.5):")
    many = ["dog", "sofa", "window", "lamp", "pillow", "blanket"]
    for seed in (0, 1, 2):
        print(f"  seed={seed}: {drop_tags(many, 0.5, seed)}")

    print("\nshuffled variant for training-time augmentation:")
    print(f"  {build_control_sentence(many, shuffle_seed=7)!r}")

    print("\nquery templates:")
    for q in format_queries("category", ["dog", "cat"]):
        print(f"  {q!r}")
    for q in format_queries("attribute", ["furry"]):
        print(f"  {q!r}")

    scores = [("dog", 0.91), ("cat", 0.12), ("sofa", 0.77), ("lamp", 0.48)]
    print(f"\nthresholding predictions at 0.5: {threshold_tags(scores, 0.5)}")


if __name__ == "__main__":
    main()
