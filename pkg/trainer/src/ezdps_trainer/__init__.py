"""Training-side companion to the ezdps prover: fits PCA and one-vs-rest
RBF-SVM models, quantizes them to the Q31.32 model schema, and exports
fixture files (model, held-out samples, reference labels)."""

__version__ = "0.1.0"
