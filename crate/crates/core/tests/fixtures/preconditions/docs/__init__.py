"""Estimators with documented parameter constraints."""


def fit_linear(X, penalty='l2'):
    """Fit a linear model.

    Parameters
    ----------
    X : array-like
        Training data.
    penalty : {'l1', 'l2'}, default='l2'
        Norm used in the penalization.
    """


def fit_tree(X, criterion='gini'):
    """Fit a decision tree.

    Parameters
    ----------
    X : array-like
        Training data.
    criterion : {"gini", "entropy", "log_loss"}, default="gini"
        The function to measure the quality of a split.
    """


def impute(X, strategy='mean'):
    """Replace missing values.

    Parameters
    ----------
    X : array-like
        Data with missing values.
    strategy : {'mean', 'median', 'most_frequent', 'constant'}, optional
        The imputation strategy.
    """


def scale(X, norm='l2'):
    """Scale samples to unit norm.

    Parameters
    ----------
    X : array-like
        Samples.
    norm : {'l1', 'l2', 'max'}, default='l2'
        The norm to use to normalize each non zero sample.
    """


def cluster(X, init='k-means++'):
    """Cluster samples.

    Parameters
    ----------
    X : array-like
        Samples.
    init : {'k-means++', 'random'}, default='k-means++'
        Method for initialization.
    """


def decompose(X, svd_solver='auto'):
    """Project onto principal components.

    Parameters
    ----------
    X : array-like
        Samples.
    svd_solver : {'auto', 'full', 'arpack', 'randomized'}, default='auto'
        Solver used for the decomposition.
    """


def neighbors(X, weights='uniform'):
    """Query nearest neighbors.

    Parameters
    ----------
    X : array-like
        Samples.
    weights : {'uniform', 'distance'}, default='uniform'
        Weight function used in prediction.
    """


def kernel_fit(X, kernel='rbf'):
    """Fit a kernel machine.

    Parameters
    ----------
    X : array-like
        Samples.
    kernel : {'linear', 'poly', 'rbf', 'sigmoid', 'precomputed'}, default='rbf'
        Specifies the kernel type to be used in the algorithm.
    """


def encode(X, handle_unknown='error'):
    """Encode categorical features.

    Parameters
    ----------
    X : array-like
        Categories.
    handle_unknown : {'error', 'ignore', 'infrequent_if_exist'}, default='error'
        What to do when an unknown category is seen during transform.
    """


def bin_values(X, encode_as='onehot'):
    """Discretize continuous features.

    Parameters
    ----------
    X : array-like
        Values.
    encode_as : {'onehot', 'onehot-dense', 'ordinal'}, default='onehot'
        Method used to encode the transformed result.
    """


def regularize(X, C=1.0):
    """Fit with regularization.

    Parameters
    ----------
    X : array-like
        Samples.
    C : float, default=1.0
        Regularization parameter. Must be strictly positive.
    """


def smooth(X, alpha=1.0):
    """Additive smoothing.

    Parameters
    ----------
    X : array-like
        Counts.
    alpha : float, default=1.0
        Additive smoothing parameter. Must be non-negative.
    """


def split(X, test_size=0.25):
    """Split into train and test.

    Parameters
    ----------
    X : array-like
        Samples.
    test_size : float, default=0.25
        Proportion of the dataset to include in the test split. Should be between 0.0 and 1.0.
    """


def subsample(X, ratio=0.5):
    """Draw a random subsample.

    Parameters
    ----------
    X : array-like
        Samples.
    ratio : float, default=0.5
        Fraction of samples to draw, in the range (0, 1].
    """


def boost(X, n_estimators=100):
    """Fit a boosted ensemble.

    Parameters
    ----------
    X : array-like
        Samples.
    n_estimators : int, default=100
        The number of boosting stages to perform. Must be at least 1.
    """


def iterate(X, max_iter=200):
    """Run an iterative solver.

    Parameters
    ----------
    X : array-like
        Samples.
    max_iter : int, default=200
        Maximum number of iterations. Must be greater than 0.
    """


def blend(X, l1_ratio=0.5):
    """Elastic-net mixing.

    Parameters
    ----------
    X : array-like
        Samples.
    l1_ratio : float, default=0.5
        The mixing parameter, which must be greater than or equal to 0 and less than or equal to 1.
    """


def anneal(X, tol=1e-4):
    """Anneal until convergence.

    Parameters
    ----------
    X : array-like
        Samples.
    tol : float, default=1e-4
        Tolerance for stopping. Typically must be greater than 0.
    """


def shrink(X, shrinkage=0.1):
    """Shrink the covariance estimate.

    Parameters
    ----------
    X : array-like
        Samples.
    shrinkage : float, default=0.1
        Coefficient in the convex combination. It is usually between 0 and 1.
    """


def perplex(X, perplexity=30.0):
    """Embed in two dimensions.

    Parameters
    ----------
    X : array-like
        Samples.
    perplexity : float, default=30.0
        Related to the number of nearest neighbors. Larger datasets often require values larger than 5.
    """


def logistic(X, solver='lbfgs', dual=False):
    """Fit a logistic model.

    Parameters
    ----------
    X : array-like
        Samples.
    solver : str, default='lbfgs'
        Algorithm to use in the optimization problem.
    dual : bool, default=False
        Dual formulation. Only used when solver is 'liblinear'.
    """


def sgd(X, learning_rate='optimal', eta0=0.0):
    """Stochastic gradient descent.

    Parameters
    ----------
    X : array-like
        Samples.
    learning_rate : str, default='optimal'
        The learning rate schedule.
    eta0 : float, default=0.0
        The initial learning rate. Ignored if learning_rate is 'optimal'.
    """


def svm(X, kernel='rbf', degree=3):
    """Support vector machine.

    Parameters
    ----------
    X : array-like
        Samples.
    kernel : str, default='rbf'
        Kernel type.
    degree : int, default=3
        Degree of the polynomial kernel function. Ignored by all other kernels; only used if kernel is 'poly'.
    """


def boost_trees(X, loss='squared_error', alpha=0.9):
    """Gradient boosted regression.

    Parameters
    ----------
    X : array-like
        Samples.
    loss : str, default='squared_error'
        Loss function to be optimized.
    alpha : float, default=0.9
        The quantile level. Only used if loss is 'huber' or 'quantile'.
    """


def forest(X, bootstrap=True, oob_score=False):
    """Random forest.

    Parameters
    ----------
    X : array-like
        Samples.
    bootstrap : bool, default=True
        Whether bootstrap samples are used when building trees.
    oob_score : bool, default=False
        Whether to use out-of-bag samples to estimate the score. Only relevant if bootstrap is True.
    """


def early_stop(X, early_stopping=False, validation_fraction=0.1):
    """Train with optional early stopping.

    Parameters
    ----------
    X : array-like
        Samples.
    early_stopping : bool, default=False
        Whether to stop when the validation score stops improving.
    validation_fraction : float, default=0.1
        The proportion of training data to set aside as validation set. Only used if early_stopping is True.
    """


def mlp(X, solver='adam', momentum=0.9):
    """Multi-layer perceptron.

    Parameters
    ----------
    X : array-like
        Samples.
    solver : str, default='adam'
        The solver for weight optimization.
    momentum : float, default=0.9
        Momentum for gradient descent update. Only used when solver is 'sgd'.
    """


def poly(X, kernel='rbf', coef0=0.0):
    """Kernel model.

    Parameters
    ----------
    X : array-like
        Samples.
    kernel : str, default='rbf'
        Kernel type.
    coef0 : float, default=0.0
        Independent term in kernel function. It is ignored unless kernel is 'poly' or 'sigmoid'.
    """


def spectral(X, affinity='rbf', n_neighbors=10):
    """Spectral embedding.

    Parameters
    ----------
    X : array-like
        Samples.
    affinity : str, default='rbf'
        How to construct the affinity matrix.
    n_neighbors : int, default=10
        Number of nearest neighbors for the graph. Ignored when affinity is 'rbf'.
    """


def ridge(X, solver='auto', random_state=None):
    """Ridge regression.

    Parameters
    ----------
    X : array-like
        Samples.
    solver : str, default='auto'
        Solver to use in the computational routines.
    random_state : int, default=None
        Used when solver is 'sag' or 'saga' to shuffle the data.
    """
