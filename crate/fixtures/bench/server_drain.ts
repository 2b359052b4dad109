; Accept a batch of requests and drain it, or shut down for good.
(system
  (vars (pc Int) (req Int))
  (init (and (= pc 0) (= req 0)))
  (trans
    (rule (= pc 0) ((req *) (pc 1)))
    (rule (= pc 0) ((req 0) (pc 9)))
    (rule (and (= pc 1) (> req 0)) ((req (- req 1))))
    (rule (and (= pc 1) (<= req 0)) ((req 0) (pc 0)))
    (rule (= pc 9) ())))
