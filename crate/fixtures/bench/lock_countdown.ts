; Acquire a lock, count a workload down to zero, release, pick new work.
(system
  (vars (pc Int) (lock Int) (n Int))
  (init (and (= pc 0) (= lock 0) (>= n 0) (<= n 4)))
  (trans
    (rule (= pc 0) ((lock 1) (pc 1)))
    (rule (and (= pc 1) (> n 0)) ((n (- n 1)) (pc 2)))
    (rule (and (= pc 1) (<= n 0)) ((pc 3)))
    (rule (= pc 2) ((pc 1)))
    (rule (= pc 3) ((lock 0) (pc 4)))
    (rule (= pc 4) ((n *) (pc 5)))
    (rule (and (= pc 5) (>= n 0) (<= n 4)) ((pc 0)))
    (rule (and (= pc 5) (or (< n 0) (> n 4))) ((n 0) (pc 0)))))
